// elgen: certificate production/verification, generating sets, Kazhdan
// budget checks, stable-range reductions, and Schreier gap tables.
//
// Exit codes: 0 success, 1 usage error, 2 domain error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "elgen/elgen.hpp"
#include "elgen/json_io.hpp"

namespace {

using namespace elgen;

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) fail(errc::malformed_input, "cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const json& j, bool pretty, const std::string& out_path) {
    std::string text = pretty ? j.dump(2) : j.dump();
    if (out_path.empty() || out_path == "-") {
        std::cout << text << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) fail(errc::malformed_input, "cannot open output file: " + out_path);
        out << text << "\n";
    }
}

Rat parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

json bound_to_json(const BoundScalar& b) {
    auto [lo, hi] = b.enclosure(Rat(1, Int("1000000000000")));
    return json{{"lower", lo.str()}, {"upper", hi.str()}, {"approx", b.approx()}};
}

RingDesc parse_ring(const std::string& spec) {
    if (spec == "Z" || spec.empty()) return RingDesc::Z();
    if (spec.rfind("mod:", 0) == 0) return RingDesc::Zmod(Int(spec.substr(4)));
    if (spec.rfind("matrix:", 0) == 0)
        return RingDesc::matrix_over(RingDesc::Z(), std::stoi(spec.substr(7)));
    fail(errc::malformed_input, "unknown ring spec '" + spec + "' (use Z, mod:q, matrix:n)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact bounded elementary factorization toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    long seed = 0;
    if (const char* env = std::getenv("ELGEN_SEED")) seed = std::atol(env);
    app.add_option("--seed", seed, "seed for randomized batch helpers (library ops are deterministic)");
    bool pretty = false;
    app.add_flag("--pretty", pretty, "indent JSON output");

    // gens
    auto* gens = app.add_subcommand("gens", "emit a generating set as JSON");
    bool g_uniform = false, g_matring = false;
    int g_m = 12, g_d = 3, g_sd = 0, g_block = 1;
    std::string g_ring = "Z", g_out;
    gens->add_flag("--uniform", g_uniform, "uniform family for SL_m(Z)");
    gens->add_option("--m", g_m, "ambient dimension for --uniform");
    gens->add_option("--d", g_d, "small block dimension (default 3)");
    gens->add_option("--sd", g_sd, "emit S_d(R) for this d");
    gens->add_option("--ring", g_ring, "ring for --sd / --matring: Z | mod:q | matrix:n");
    gens->add_flag("--matring", g_matring, "emit the matrix-ring generators A_i, B");
    gens->add_option("--block", g_block, "block size n for --matring");
    gens->add_option("--out", g_out, "output path (default stdout)");

    // decompose
    auto* dec = app.add_subcommand("decompose", "factor an SL matrix into a certificate");
    std::string d_in, d_out, d_strategy = "recursive", d_mode = "shallow";
    int d_d = 3;
    dec->add_option("--in", d_in, "matrix JSON (default stdin)");
    dec->add_option("--out", d_out, "output path (default stdout)");
    dec->add_option("--d", d_d, "residue dimension (default 3)");
    dec->add_option("--strategy", d_strategy, "recursive | dv2");
    dec->add_option("--mode", d_mode, "shallow | deep");

    // verify
    auto* ver = app.add_subcommand("verify", "check a certificate JSON");
    std::string v_in;
    ver->add_option("--in", v_in, "certificate JSON (default stdin)");

    // budget
    auto* bud = app.add_subcommand("budget", "Kazhdan budget arithmetic");
    int b_l = 1;
    long b_count = 340;
    std::string b_eps0 = "1", b_eps1 = "auto", b_out;
    bud->add_option("--l", b_l, "ring generator count (default 1)");
    bud->add_option("--eps0", b_eps0, "rational p/q");
    bud->add_option("--eps1", b_eps1, "rational p/q, or 'auto' for just below threshold");
    bud->add_option("--count", b_count, "elementary factor budget (default 340)");
    bud->add_option("--out", b_out, "output path (default stdout)");

    // reduce
    auto* red = app.add_subcommand("reduce", "stable-range reduction of a unimodular sequence");
    std::string r_in, r_out, r_op = "reduce";
    red->add_option("--in", r_in, "sequence JSON (default stdin)");
    red->add_option("--out", r_out, "output path (default stdout)");
    red->add_option("--op", r_op, "reduce | bezout | check");

    // spectral
    auto* spec = app.add_subcommand("spectral", "Schreier graph gap table");
    int s_nlo = 3, s_nhi = 5;
    long s_q = 2;
    double s_tol = 1e-10;
    std::string s_family = "both", s_action = "projective", s_format = "json", s_out,
                s_range;
    spec->add_option("--n-range", s_range, "range like 3..6 (overrides --n-lo/--n-hi)");
    spec->add_option("--n-lo", s_nlo, "smallest n");
    spec->add_option("--n-hi", s_nhi, "largest n");
    spec->add_option("--q", s_q, "prime modulus <= 7");
    spec->add_option("--family", s_family, "elementary | uniform | both");
    spec->add_option("--action", s_action, "projective | vectors");
    spec->add_option("--tol", s_tol, "power iteration residual tolerance");
    spec->add_option("--format", s_format, "json | tsv");
    spec->add_option("--out", s_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);
    (void)seed;

    try {
        if (*gens) {
            GenSet g;
            if (g_uniform)
                g = uniform_set(g_m, g_d);
            else if (g_matring)
                g = matring_generators(parse_ring(g_ring).scalar(), g_block);
            else if (g_sd >= 3)
                g = gen_set_S_d(parse_ring(g_ring), g_sd);
            else
                fail(errc::malformed_input, "gens: pick --uniform, --sd D, or --matring");
            emit(genset_to_json(g), pretty, g_out);
            return 0;
        }
        if (*dec) {
            json in = json::parse(read_input(d_in));
            Matrix t = matrix_from_json(in);
            Strategy strategy = d_strategy == "dv2" ? Strategy::dv2 : Strategy::recursive;
            if (d_strategy != "dv2" && d_strategy != "recursive")
                fail(errc::malformed_input, "decompose: unknown strategy '" + d_strategy + "'");
            DecomposeMode mode =
                d_mode == "deep" ? DecomposeMode::deep : DecomposeMode::shallow;
            Certificate c = decompose_full(t, d_d, mode, strategy);
            emit(certificate_to_json(c), pretty, d_out);
            return 0;
        }
        if (*ver) {
            json in = json::parse(read_input(v_in));
            Certificate c = certificate_from_json(in);
            bool ok = verify_certificate(c);
            emit(json{{"v", 1}, {"valid", ok}}, pretty, "");
            return ok ? 0 : 2;
        }
        if (*bud) {
            BoundScalar eps0 = BoundScalar::rational(parse_rational(b_eps0));
            BoundScalar threshold = epsilon1_threshold(eps0, b_l);
            BoundScalar eps1 = b_eps1 == "auto"
                                   ? threshold * BoundScalar::rational(Rat(999999, 1000000))
                                   : BoundScalar::rational(parse_rational(b_eps1));
            Budget b = Budget::make(b_l, eps0, eps1, b_count);
            bool verified = budget_verify(b);
            json out{{"v", 1},
                     {"l", b_l},
                     {"c_el", b_count},
                     {"k0", b.k0},
                     {"k", b.k},
                     {"eps0", b_eps0},
                     {"threshold", bound_to_json(threshold)},
                     {"eps1", bound_to_json(eps1)},
                     {"verified", verified},
                     {"eps1_below_eps0", budget_eps1_below_eps0(b)}};
            emit(out, pretty, b_out);
            return verified ? 0 : 2;
        }
        if (*red) {
            json in = json::parse(read_input(r_in));
            UniSeq s = seq_from_json(in);
            if (r_op == "check") {
                bool uni = is_unimodular(s);
                emit(json{{"v", 1}, {"unimodular", uni}}, pretty, r_out);
                return uni ? 0 : 2;
            }
            if (r_op == "bezout") {
                Bezout bz = bezout(s);
                UniSeq coeffs{s.ring, bz.coefficients};
                json out{{"v", 1}, {"kind", "bezout"}, {"coefficients", seq_to_json(coeffs)["elements"]},
                         {"ring", ring_to_json(s.ring)}};
                emit(out, pretty, r_out);
                return 0;
            }
            Reduction r = reduce_unimodular(s);
            UniSeq coeffs{s.ring, r.coefficients};
            json out{{"v", 1},
                     {"kind", "reduction"},
                     {"ring", ring_to_json(s.ring)},
                     {"coefficients", seq_to_json(coeffs)["elements"]},
                     {"reduced", seq_to_json(r.reduced)}};
            emit(out, pretty, r_out);
            return 0;
        }
        if (*spec) {
            if (!s_range.empty()) {
                auto dots = s_range.find("..");
                require(dots != std::string::npos, errc::malformed_input,
                        "spectral: --n-range wants the form LO..HI");
                s_nlo = std::stoi(s_range.substr(0, dots));
                s_nhi = std::stoi(s_range.substr(dots + 2));
            }
            std::vector<GapFamily> fams;
            if (s_family == "elementary" || s_family == "both") fams.push_back(GapFamily::elementary);
            if (s_family == "uniform" || s_family == "both") fams.push_back(GapFamily::uniform);
            require(!fams.empty(), errc::malformed_input, "spectral: unknown family");
            SchreierAction action =
                s_action == "vectors" ? SchreierAction::vectors : SchreierAction::projective;
            auto rows = gap_table(s_nlo, s_nhi, s_q, fams, action, s_tol);
            if (s_format == "tsv") {
                std::ostringstream ss;
                ss << "n\tfamily\tset_size\tvertices\tdegree\tgap\tgap_abs\tconnected\n";
                char buf[64];
                for (const GapRow& r : rows) {
                    std::snprintf(buf, sizeof buf, "%.12g", r.gap);
                    std::string gap = buf;
                    std::snprintf(buf, sizeof buf, "%.12g", r.gap_abs);
                    ss << r.n << "\t" << r.family << "\t" << r.set_size << "\t" << r.vertices
                       << "\t" << r.degree << "\t" << gap << "\t" << buf << "\t"
                       << (r.connected ? 1 : 0) << "\n";
                }
                if (s_out.empty() || s_out == "-")
                    std::cout << ss.str();
                else
                    std::ofstream(s_out) << ss.str();
            } else {
                json out{{"v", 1}, {"kind", "gap_table"}, {"rows", json::array()}};
                for (const GapRow& r : rows)
                    out["rows"].push_back(json{{"n", r.n},
                                               {"family", r.family},
                                               {"set_size", r.set_size},
                                               {"vertices", r.vertices},
                                               {"degree", r.degree},
                                               {"gap", r.gap},
                                               {"gap_abs", r.gap_abs},
                                               {"connected", r.connected}});
                emit(out, pretty, s_out);
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: invalid JSON input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
