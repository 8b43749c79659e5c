#pragma once

#include <memory>
#include <string>
#include <vector>

#include "elgen/errors.hpp"
#include "elgen/integers.hpp"

namespace elgen {

/// Description of a ring in the supported tower: Z, Z/q, or M_n over a
/// scalar base (nesting depth at most one). Matrix-ring elements are stored
/// flat in the base ring; the descriptor carries the block size.
class RingDesc {
  public:
    enum class Kind { integers, modular, matrix };

    RingDesc() = default;

    static RingDesc Z() { return RingDesc(); }

    static RingDesc Zmod(Int q) {
        require(q >= 2, errc::malformed_input, "modulus must be >= 2");
        RingDesc r;
        r.kind_ = Kind::modular;
        r.modulus_ = std::move(q);
        return r;
    }

    static RingDesc matrix_over(const RingDesc& base, int n) {
        require(base.kind_ != Kind::matrix, errc::malformed_input,
                "matrix-ring nesting depth must be <= 1");
        require(n >= 1, errc::malformed_input, "block size must be >= 1");
        RingDesc r;
        r.kind_ = Kind::matrix;
        r.block_n_ = n;
        r.base_ = std::make_shared<RingDesc>(base);
        return r;
    }

    Kind kind() const { return kind_; }
    bool is_matrix_ring() const { return kind_ == Kind::matrix; }

    // Scalar ring the flat entries live in (self for Z and Z/q).
    const RingDesc& scalar() const { return kind_ == Kind::matrix ? *base_ : *this; }

    bool scalar_is_modular() const { return scalar().kind_ == Kind::modular; }
    const Int& scalar_modulus() const { return scalar().modulus_; }

    int block_n() const { return kind_ == Kind::matrix ? block_n_ : 1; }

    const RingDesc& base() const {
        require(kind_ == Kind::matrix, errc::malformed_input, "base(): not a matrix ring");
        return *base_;
    }

    // Declared generating set of the ring, as scalar values for scalar rings
    // (default {1}); matrix rings are generated by {A_1..A_l, B}.
    const std::vector<Int>& scalar_generators() const {
        static const std::vector<Int> unit{Int(1)};
        const RingDesc& s = scalar();
        return s.scalar_gens_.empty() ? unit : s.scalar_gens_;
    }

    RingDesc with_scalar_generators(std::vector<Int> gens) const {
        require(!gens.empty(), errc::malformed_input, "generator list must be non-empty");
        RingDesc r = *this;
        if (r.kind_ == Kind::matrix)
            r.base_ = std::make_shared<RingDesc>(r.base_->with_scalar_generators(std::move(gens)));
        else
            r.scalar_gens_ = std::move(gens);
        return r;
    }

    int generator_count() const {
        int l = static_cast<int>(scalar_generators().size());
        return kind_ == Kind::matrix ? l + 1 : l;
    }

    int declared_stable_range() const {
        switch (kind_) {
        case Kind::integers: return 2;
        case Kind::modular: return 1;
        case Kind::matrix: {
            int k = base_->declared_stable_range();
            return 1 + (k - 1) / block_n_;
        }
        }
        return 2;
    }

    bool operator==(const RingDesc& o) const {
        if (kind_ != o.kind_) return false;
        switch (kind_) {
        case Kind::integers: return true;
        case Kind::modular: return modulus_ == o.modulus_;
        case Kind::matrix: return block_n_ == o.block_n_ && *base_ == *o.base_;
        }
        return false;
    }
    bool operator!=(const RingDesc& o) const { return !(*this == o); }

    std::string str() const {
        switch (kind_) {
        case Kind::integers: return "Z";
        case Kind::modular: return "Z/" + modulus_.str();
        case Kind::matrix: return "M_" + std::to_string(block_n_) + "(" + base_->str() + ")";
        }
        return "?";
    }

  private:
    Kind kind_ = Kind::integers;
    Int modulus_;
    int block_n_ = 1;
    std::shared_ptr<const RingDesc> base_;
    std::vector<Int> scalar_gens_; // empty means the default {1}
};

/// sr(M_n(R)) = 1 + floor((k-1)/n) for a base ring of stable range k.
inline int stable_range_matrix(int k, int n) {
    require(k >= 1 && n >= 1, errc::malformed_input, "stable_range_matrix: k, n must be >= 1");
    return 1 + (k - 1) / n;
}

} // namespace elgen
