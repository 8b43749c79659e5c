#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "elgen/budget.hpp"
#include "elgen/decompose.hpp"
#include "elgen/elwords.hpp"
#include "elgen/errors.hpp"
#include "elgen/matrix.hpp"
#include "elgen/ring.hpp"
#include "elgen/unimodular.hpp"

namespace elgen {

using nlohmann::json;

// ---- ring ----------------------------------------------------------------

inline json ring_to_json(const RingDesc& r) {
    json kind;
    switch (r.kind()) {
    case RingDesc::Kind::integers: kind = "Z"; break;
    case RingDesc::Kind::modular: kind = json{{"mod", r.scalar_modulus().str()}}; break;
    case RingDesc::Kind::matrix:
        kind = json{{"matrix", {{"base", ring_to_json(r.base())}, {"n", r.block_n()}}}};
        break;
    }
    json out{{"kind", kind}};
    if (!r.is_matrix_ring() && r.scalar_generators().size() > 1) {
        json gens = json::array();
        for (const Int& g : r.scalar_generators()) gens.push_back(g.str());
        out["generators"] = gens;
    }
    return out;
}

inline Int int_from_json(const json& j) {
    if (j.is_number_integer()) return Int(j.get<long long>());
    if (j.is_string()) return Int(j.get<std::string>());
    fail(errc::malformed_input, "expected an integer or a decimal string");
}

inline RingDesc ring_from_json(const json& j) {
    require(j.contains("kind"), errc::malformed_input, "ring: missing kind");
    const json& kind = j["kind"];
    RingDesc r;
    if (kind.is_string() && kind.get<std::string>() == "Z") {
        r = RingDesc::Z();
    } else if (kind.is_object() && kind.contains("mod")) {
        r = RingDesc::Zmod(int_from_json(kind["mod"]));
    } else if (kind.is_object() && kind.contains("matrix")) {
        const json& m = kind["matrix"];
        r = RingDesc::matrix_over(ring_from_json(m["base"]), m["n"].get<int>());
    } else {
        fail(errc::malformed_input, "ring: unknown kind");
    }
    if (j.contains("generators")) {
        std::vector<Int> gens;
        for (const json& g : j["generators"]) gens.push_back(int_from_json(g));
        r = r.with_scalar_generators(std::move(gens));
    }
    return r;
}

// ---- matrices ------------------------------------------------------------

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j).str());
        rows.push_back(std::move(row));
    }
    return json{{"ring", ring_to_json(m.ring())},
                {"rows", m.rows()},
                {"cols", m.cols()},
                {"entries", rows}};
}

inline Matrix matrix_from_json(const json& j) {
    require(j.contains("ring") && j.contains("entries"), errc::malformed_input,
            "matrix: missing ring or entries");
    RingDesc ring = ring_from_json(j["ring"]);
    const json& entries = j["entries"];
    int rows = j.contains("rows") ? j["rows"].get<int>() : static_cast<int>(entries.size());
    require(static_cast<int>(entries.size()) == rows, errc::malformed_input,
            "matrix: row count mismatch");
    int cols = j.contains("cols") ? j["cols"].get<int>()
                                  : (rows ? static_cast<int>(entries[0].size()) : 0);
    Matrix m(ring, rows, cols);
    for (int i = 0; i < rows; ++i) {
        require(static_cast<int>(entries[i].size()) == cols, errc::malformed_input,
                "matrix: ragged entries");
        for (int jj = 0; jj < cols; ++jj) m.set(i, jj, int_from_json(entries[i][jj]));
    }
    return m;
}

// ---- sequences -----------------------------------------------------------

inline json seq_to_json(const UniSeq& s) {
    json elems = json::array();
    for (const Matrix& e : s.elements) {
        if (s.ring.kind() == RingDesc::Kind::matrix) {
            json rows = json::array();
            for (int i = 0; i < e.rows(); ++i) {
                json row = json::array();
                for (int j = 0; j < e.cols(); ++j) row.push_back(e.at(i, j).str());
                rows.push_back(std::move(row));
            }
            elems.push_back(std::move(rows));
        } else {
            elems.push_back(e.at(0, 0).str());
        }
    }
    return json{{"v", 1}, {"kind", "sequence"}, {"ring", ring_to_json(s.ring)}, {"elements", elems}};
}

inline UniSeq seq_from_json(const json& j) {
    require(j.contains("ring") && j.contains("elements"), errc::malformed_input,
            "sequence: missing ring or elements");
    UniSeq s;
    s.ring = ring_from_json(j["ring"]);
    const RingDesc scalar = s.ring.scalar();
    int n = s.ring.block_n();
    for (const json& e : j["elements"]) {
        if (s.ring.kind() == RingDesc::Kind::matrix) {
            require(e.is_array() && static_cast<int>(e.size()) == n, errc::malformed_input,
                    "sequence: element block size mismatch");
            Matrix m(scalar, n, n);
            for (int i = 0; i < n; ++i)
                for (int jj = 0; jj < n; ++jj) m.set(i, jj, int_from_json(e[i][jj]));
            s.elements.push_back(std::move(m));
        } else {
            Matrix m(scalar, 1, 1);
            m.set(0, 0, int_from_json(e));
            s.elements.push_back(std::move(m));
        }
    }
    return s;
}

// ---- words and certificates ------------------------------------------------

inline json word_to_json(const Word& w) {
    json factors = json::array();
    for (const ElemFactor& f : w.factors) {
        json r = json::array();
        for (int i = 0; i < f.coeff.rows(); ++i) {
            json row = json::array();
            for (int j = 0; j < f.coeff.cols(); ++j) row.push_back(f.coeff.at(i, j).str());
            r.push_back(std::move(row));
        }
        factors.push_back(json{{"i", f.i},
                               {"j", f.j},
                               {"side", f.side == Side::left ? "left" : "right"},
                               {"r", std::move(r)}});
    }
    return json{{"ring", ring_to_json(w.scalar_ring)},
                {"size", w.size},
                {"level", w.level == Level::block ? "block" : "base"},
                {"n", w.block_n},
                {"factors", std::move(factors)}};
}

inline Word word_from_json(const json& j) {
    Word w;
    w.scalar_ring = ring_from_json(j["ring"]);
    w.size = j["size"].get<int>();
    w.level = j["level"].get<std::string>() == "block" ? Level::block : Level::base;
    w.block_n = j["n"].get<int>();
    for (const json& fj : j["factors"]) {
        ElemFactor f;
        f.i = fj["i"].get<int>();
        f.j = fj["j"].get<int>();
        f.side = fj["side"].get<std::string>() == "right" ? Side::right : Side::left;
        f.size = w.size;
        f.level = w.level;
        f.block_n = w.block_n;
        const json& r = fj["r"];
        int n = static_cast<int>(r.size());
        Matrix coeff(w.scalar_ring, n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) coeff.set(a, b, int_from_json(r[a][b]));
        f.coeff = std::move(coeff);
        require(f.i != f.j && f.i >= 1 && f.j >= 1 && f.i <= w.size && f.j <= w.size,
                errc::malformed_input, "word: bad factor indices");
        w.factors.push_back(std::move(f));
    }
    return w;
}

inline json certificate_to_json(const Certificate& c) {
    json stages = json::array();
    auto peel_stage = [](const std::vector<PeelFactor>& fs, const char* side) {
        json factors = json::array();
        for (const PeelFactor& f : fs)
            factors.push_back(json{{"conjugator", matrix_to_json(f.conjugator)},
                                   {"element", matrix_to_json(f.element)}});
        return json{{"kind", "peel"}, {"side", side}, {"factors", std::move(factors)}};
    };
    if (!c.peel_left.empty() || !c.peel_right.empty()) {
        json s = peel_stage(c.peel_left, "left");
        s["per_index_counts"] = c.peel_index_counts;
        stages.push_back(std::move(s));
    }
    if (c.pipeline_dim > 0) {
        stages.push_back(json{{"kind", "corner"}, {"side", "left"}, {"word", word_to_json(c.corner_left)}});
        for (const CommStage& st : c.commutators)
            stages.push_back(json{{"kind", "commutator"},
                                  {"g", matrix_to_json(st.g)},
                                  {"h", matrix_to_json(st.h)},
                                  {"word", word_to_json(st.word)}});
        stages.push_back(json{{"kind", "corner"}, {"side", "right"}, {"word", word_to_json(c.corner_right)}});
    }
    if (!c.peel_right.empty() || !c.peel_left.empty())
        stages.push_back(peel_stage(c.peel_right, "right"));

    json children = json::array();
    for (const auto& ch : c.children) children.push_back(certificate_to_json(*ch));

    return json{{"v", 1},
                {"kind", "certificate"},
                {"input", matrix_to_json(c.input)},
                {"d", c.target_d},
                {"strategy", strategy_name(c.strategy)},
                {"mode", c.mode == DecomposeMode::deep ? "deep" : "shallow"},
                {"pipeline_dim", c.pipeline_dim},
                {"stages", std::move(stages)},
                {"residue", matrix_to_json(c.residue)},
                {"residue_core_dim", c.residue_core_dim},
                {"counts",
                 {{"elementary_block", c.counts.elementary_block},
                  {"elementary_base", c.counts.elementary_base},
                  {"commutators", c.counts.commutators},
                  {"peel_factors", c.counts.peel_factors},
                  {"max_coeff_bits", c.counts.max_coeff_bits}}},
                {"children", std::move(children)}};
}

inline Certificate certificate_from_json(const json& j) {
    Certificate c;
    c.input = matrix_from_json(j["input"]);
    c.target_d = j["d"].get<int>();
    c.strategy = j["strategy"].get<std::string>() == "dv2" ? Strategy::dv2 : Strategy::recursive;
    c.mode = j.value("mode", "shallow") == std::string("deep") ? DecomposeMode::deep
                                                               : DecomposeMode::shallow;
    c.pipeline_dim = j.value("pipeline_dim", 0);
    c.residue = matrix_from_json(j["residue"]);
    c.residue_core_dim = j.value("residue_core_dim", c.residue.rows());
    const json& counts = j["counts"];
    c.counts.elementary_block = counts["elementary_block"].get<long>();
    c.counts.elementary_base = counts["elementary_base"].get<long>();
    c.counts.commutators = counts["commutators"].get<long>();
    c.counts.peel_factors = counts["peel_factors"].get<long>();
    c.counts.max_coeff_bits = counts.value("max_coeff_bits", 0L);

    bool corner_left_seen = false;
    for (const json& s : j["stages"]) {
        std::string kind = s["kind"].get<std::string>();
        if (kind == "peel") {
            auto& target = s["side"].get<std::string>() == "left" ? c.peel_left : c.peel_right;
            for (const json& fj : s["factors"]) {
                PeelFactor f;
                f.side = s["side"].get<std::string>() == "left" ? Side::left : Side::right;
                f.conjugator = matrix_from_json(fj["conjugator"]);
                f.element = matrix_from_json(fj["element"]);
                target.push_back(std::move(f));
            }
            if (s.contains("per_index_counts"))
                c.peel_index_counts = s["per_index_counts"].get<std::vector<int>>();
        } else if (kind == "corner") {
            Word w = word_from_json(s["word"]);
            if (s["side"].get<std::string>() == "left") {
                c.corner_left = std::move(w);
                corner_left_seen = true;
            } else {
                c.corner_right = std::move(w);
            }
        } else if (kind == "commutator") {
            CommStage st;
            st.g = matrix_from_json(s["g"]);
            st.h = matrix_from_json(s["h"]);
            st.word = word_from_json(s["word"]);
            c.commutators.push_back(std::move(st));
        } else {
            fail(errc::malformed_input, "certificate: unknown stage kind '" + kind + "'");
        }
    }
    if (c.pipeline_dim > 0 && !corner_left_seen)
        fail(errc::malformed_input, "certificate: pipeline declared but corner stages missing");
    for (const json& ch : j.value("children", json::array()))
        c.children.push_back(std::make_shared<Certificate>(certificate_from_json(ch)));
    return c;
}

// ---- generating sets -------------------------------------------------------

inline json genset_to_json(const GenSet& g) {
    json mats = json::array();
    for (const Matrix& m : g.matrices) mats.push_back(matrix_to_json(m));
    return json{{"v", 1},
                {"kind", "genset"},
                {"metadata",
                 {{"name", g.name},
                  {"d", g.d},
                  {"l", g.l},
                  {"n", g.n},
                  {"size", g.size()},
                  {"size_distinct", g.size_distinct},
                  {"notes", g.notes}}},
                {"matrices", std::move(mats)}};
}

} // namespace elgen
