#pragma once

// Multiquadratic fields over Q, described by their square-class lattices.
// A field of degree 2^m is a set of m independent squarefree integers > 1;
// generators are canonicalized by Gaussian elimination over F2 on prime
// supports, which makes field equality and subfield tests decidable. The
// character table attaches a fundamental discriminant (hence a Kronecker
// symbol) to every class, and all splitting data reduces to symbol values.

#include <tamekit/dirichlet.hpp>
#include <tamekit/errors.hpp>
#include <tamekit/group_ring.hpp>
#include <tamekit/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace tamekit {

/// A class in Q^x/(Q^x)^2: a squarefree integer, with multiplication
/// rep*rep'/gcd^2. The sign is part of the class (-1 is a legal class),
/// though field generators must be positive.
class SquareClass {
public:
    explicit SquareClass(long long rep) : rep_(rep) {
        if (rep == 0 || !is_squarefree(rep))
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "square class: " + std::to_string(rep) +
                                          " is not a nonzero squarefree integer");
    }

    long long rep() const { return rep_; }
    bool is_one() const { return rep_ == 1; }
    bool negative() const { return rep_ < 0; }

    friend SquareClass operator*(SquareClass a, SquareClass b) {
        return SquareClass(mul_reps(a.rep_, b.rep_));
    }

    static long long mul_reps(long long a, long long b) {
        long long g = std::gcd(std::llabs(a), std::llabs(b));
        return (a / g) * (b / g);
    }

    std::vector<long long> prime_support() const { return factor_squarefree(rep_); }

    static std::vector<long long> factor_squarefree(long long d) {
        d = std::llabs(d);
        std::vector<long long> ps;
        for (long long q = 2; q * q <= d; ++q)
            if (d % q == 0) {
                ps.push_back(q);
                d /= q;
            }
        if (d > 1) ps.push_back(d);
        return ps;
    }

    friend bool operator==(const SquareClass&, const SquareClass&) = default;

private:
    long long rep_;
};

namespace f2 {

// Small dense linear algebra over F2; vectors are bitmasks of width m.

inline int parity(std::uint32_t x) { return std::popcount(x) & 1; }

struct Rref {
    std::vector<std::uint32_t> rows;  // reduced rows, ordered by pivot
    std::vector<int> pivots;
};

inline Rref rref(std::vector<std::uint32_t> rows, int width) {
    Rref out;
    int r = 0;
    for (int col = 0; col < width && r < (int)rows.size(); ++col) {
        int sel = -1;
        for (int i = r; i < (int)rows.size(); ++i)
            if ((rows[i] >> col) & 1u) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(rows[r], rows[sel]);
        for (int i = 0; i < (int)rows.size(); ++i)
            if (i != r && ((rows[i] >> col) & 1u)) rows[i] ^= rows[r];
        out.pivots.push_back(col);
        ++r;
    }
    rows.resize(r);
    out.rows = std::move(rows);
    return out;
}

/// Membership of x in the row space; returns the coordinates w.r.t. the
/// reduced rows when representable.
inline std::optional<std::uint32_t> coordinates(const Rref& basis, std::uint32_t x) {
    std::uint32_t coords = 0;
    for (std::size_t i = 0; i < basis.rows.size(); ++i)
        if ((x >> basis.pivots[i]) & 1u) {
            coords |= std::uint32_t(1) << i;
            x ^= basis.rows[i];
        }
    if (x) return std::nullopt;
    return coords;
}

/// Basis of { x : <rows[i], x> = 0 for all i }.
inline std::vector<std::uint32_t> nullspace(const std::vector<std::uint32_t>& rows, int width) {
    Rref rr = rref(rows, width);
    std::vector<bool> is_pivot(width, false);
    for (int p : rr.pivots) is_pivot[p] = true;
    std::vector<std::uint32_t> basis;
    for (int j = 0; j < width; ++j) {
        if (is_pivot[j]) continue;
        std::uint32_t v = std::uint32_t(1) << j;
        for (std::size_t i = 0; i < rr.rows.size(); ++i)
            if ((rr.rows[i] >> j) & 1u) v |= std::uint32_t(1) << rr.pivots[i];
        basis.push_back(v);
    }
    return basis;
}

/// Solves <rows[i], x> = t_i (t packed as bits). The systems used here are
/// consistent by construction.
inline std::uint32_t solve_pairing(std::vector<std::uint32_t> rows, std::uint32_t t, int width) {
    std::vector<int> pivots;
    std::size_t r = 0;
    for (int col = 0; col < width && r < rows.size(); ++col) {
        std::size_t sel = r;
        while (sel < rows.size() && !((rows[sel] >> col) & 1u)) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        bool tr = (t >> r) & 1u, ts = (t >> sel) & 1u;
        t = (t & ~((1u << r) | (1u << sel))) | (std::uint32_t(ts) << r) | (std::uint32_t(tr) << sel);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && ((rows[i] >> col) & 1u)) {
                rows[i] ^= rows[r];
                t ^= ((t >> r) & 1u) << i;
            }
        pivots.push_back(col);
        ++r;
    }
    for (std::size_t i = r; i < rows.size(); ++i)
        if ((t >> i) & 1u) throw internal_error("f2: inconsistent linear system");
    std::uint32_t x = 0;
    for (std::size_t i = 0; i < r; ++i)
        if ((t >> i) & 1u) x |= std::uint32_t(1) << pivots[i];
    return x;
}

}  // namespace f2

/// A totally real multiquadratic extension of Q, in canonical form.
class MultiquadField {
public:
    /// The base field Q itself (rank 0).
    static MultiquadField rationals() { return MultiquadField({}); }

    /// Builds the field Q(sqrt d : d in ds). Inputs must be squarefree,
    /// > 1 and independent modulo squares.
    static MultiquadField make(const std::vector<long long>& ds) { return MultiquadField(ds); }

    int rank() const { return (int)gens_.size(); }
    std::uint32_t degree() const { return std::uint32_t(1) << rank(); }
    const std::vector<long long>& gens() const { return gens_; }

    bool is_rationals() const { return gens_.empty(); }

    /// Squarefree representative of the class indexed by u.
    long long class_rep(std::uint32_t u) const { return classes_.at(u); }

    /// Fundamental discriminant of the character indexed by u.
    long long char_discriminant(std::uint32_t u) const { return discs_.at(u); }

    QuadChar character(std::uint32_t u) const { return QuadChar{discs_.at(u)}; }

    std::optional<std::uint32_t> coordinates_of_class(long long d) const {
        if (d == 0 || !is_squarefree(d)) return std::nullopt;
        if (d == 1) return 0u;
        if (d < 0) return std::nullopt;
        std::uint32_t mask = 0;
        for (long long p : SquareClass::factor_squarefree(d)) {
            auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
            if (it == primes_.end() || *it != p) return std::nullopt;
            mask |= std::uint32_t(1) << (it - primes_.begin());
        }
        return f2::coordinates(basis_, mask);
    }

    bool contains_class(long long d) const { return coordinates_of_class(d).has_value(); }

    bool contains_field(const MultiquadField& other) const {
        for (long long g : other.gens_)
            if (!contains_class(g)) return false;
        return true;
    }

    /// All rational primes ramifying in the field: the union of the prime
    /// divisors of the character discriminants.
    std::set<long long> ramified_primes() const {
        std::set<long long> out;
        for (std::uint32_t u = 1; u < degree(); ++u) {
            long long D = discs_[u];
            if (D % 4 == 0) out.insert(2);
            for (long long p : SquareClass::factor_squarefree(D % 4 == 0 ? D / 4 : D))
                out.insert(p);
        }
        return out;
    }

    /// CLI/manifest literal: comma-separated generators, "1" for Q.
    std::string literal() const {
        if (gens_.empty()) return "1";
        std::ostringstream os;
        for (std::size_t i = 0; i < gens_.size(); ++i) {
            if (i) os << ',';
            os << gens_[i];
        }
        return os.str();
    }

    friend bool operator==(const MultiquadField& a, const MultiquadField& b) {
        return a.gens_ == b.gens_;
    }

private:
    explicit MultiquadField(const std::vector<long long>& ds) {
        std::set<long long> prime_set;
        for (long long d : ds) {
            if (d <= 0 || d == 1)
                throw admissibility_error(
                    admissibility_error::reason::bad_input,
                    "field generator must be a squarefree integer > 1, got " + std::to_string(d));
            if (!is_squarefree(d))
                throw admissibility_error(admissibility_error::reason::bad_input,
                                          "field generator must be squarefree, got " +
                                              std::to_string(d));
            for (long long p : SquareClass::factor_squarefree(d)) prime_set.insert(p);
        }
        primes_.assign(prime_set.begin(), prime_set.end());

        std::vector<std::uint32_t> rows;
        for (long long d : ds) {
            std::uint32_t mask = 0;
            for (long long p : SquareClass::factor_squarefree(d)) {
                auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
                mask |= std::uint32_t(1) << (it - primes_.begin());
            }
            rows.push_back(mask);
        }
        basis_ = f2::rref(rows, (int)primes_.size());
        if (basis_.rows.size() != ds.size())
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "field generators are dependent modulo squares");

        for (std::uint32_t row : basis_.rows) {
            long long g = 1;
            for (std::size_t j = 0; j < primes_.size(); ++j)
                if ((row >> j) & 1u) g *= primes_[j];
            gens_.push_back(g);
        }

        classes_.assign(degree(), 1);
        for (std::uint32_t u = 1; u < degree(); ++u) {
            int low = std::countr_zero(u);
            classes_[u] = SquareClass::mul_reps(classes_[u & (u - 1)], gens_[low]);
        }
        discs_.reserve(degree());
        for (long long c : classes_) discs_.push_back(fundamental_discriminant(c));
    }

    std::vector<long long> gens_;       // canonical, ordered by pivot prime
    std::vector<long long> primes_;     // sorted prime support of the lattice
    f2::Rref basis_;                    // generator supports in reduced form
    std::vector<long long> classes_;    // 2^m squarefree class representatives
    std::vector<long long> discs_;      // 2^m fundamental discriminants
};

inline MultiquadField make_field(const std::vector<long long>& ds) {
    return MultiquadField::make(ds);
}

/// Parses "2,5" as Q(sqrt2, sqrt5); "1" denotes Q.
inline MultiquadField parse_field_literal(const std::string& text) {
    if (text == "1") return MultiquadField::rationals();
    std::vector<long long> ds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "bad field literal: '" + text + "'");
        try {
            std::size_t used = 0;
            long long v = std::stoll(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            ds.push_back(v);
        } catch (const std::exception&) {
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "bad field literal: '" + text + "'");
        }
    }
    if (ds.empty())
        throw admissibility_error(admissibility_error::reason::bad_input,
                                  "bad field literal: '" + text + "'");
    return make_field(ds);
}

struct Splitting {
    int e = 1;  // ramification index
    int f = 1;  // residue degree
    int g = 1;  // number of primes above
};

/// Decomposition of a rational prime in M, from character data: counting
/// unramified characters gives e, counting those trivial on Frobenius
/// gives f.
inline Splitting splitting(long long p, const MultiquadField& M) {
    int unram = 0, split = 0;
    for (std::uint32_t u = 0; u < M.degree(); ++u) {
        int v = kronecker(M.char_discriminant(u), p);
        if (v != 0) ++unram;
        if (v == 1) ++split;
    }
    Splitting s;
    s.e = (int)(M.degree() / unram);
    s.f = unram / split;
    s.g = split;
    return s;
}

/// Frobenius at an unramified p as an element of Gal(M/Q): bit i is set
/// iff p is inert in the i-th generator's quadratic field.
inline GroupElement frobenius_rational(long long p, const MultiquadField& M) {
    GroupElement g{M.rank(), 0};
    for (int i = 0; i < M.rank(); ++i) {
        int v = kronecker(fundamental_discriminant(M.gens()[i]), p);
        if (v == 0)
            throw admissibility_error(admissibility_error::reason::ramified_prime,
                                      "prime " + std::to_string(p) + " ramifies in " + M.literal());
        if (v == -1) g.bits |= std::uint32_t(1) << i;
    }
    return g;
}

/// w2(M): the largest N such that Gal(M(mu_N)/M) has exponent dividing 2.
/// Built prime power by prime power: ell^n passes iff every a coprime to
/// ell^n fixing the characters of M of conductor dividing ell^n satisfies
/// a^2 = 1 mod ell^n. For totally real multiquadratic M only ell in
/// {2, 3, 5} can contribute; the scan runs to 7 as a self-check.
inline long long w2(const MultiquadField& M) {
    long long result = 1;
    for (long long ell : {2LL, 3LL, 5LL, 7LL}) {
        long long passing = 1;
        for (long long q = ell;; q *= ell) {
            if (q > 2'000'000) throw internal_error("w2: prime power scan did not terminate");
            std::vector<long long> discs;
            for (std::uint32_t u = 1; u < M.degree(); ++u) {
                long long D = M.char_discriminant(u);
                long long f = D < 0 ? -D : D;
                if (q % f == 0) discs.push_back(D);
            }
            bool pass = true;
            for (long long a = 1; a < q && pass; ++a) {
                if (std::gcd(a, q) != 1) continue;
                bool fixes = true;
                for (long long D : discs)
                    if (kronecker(D, a) != 1) {
                        fixes = false;
                        break;
                    }
                if (fixes && (a * a) % q != 1) pass = false;
            }
            if (!pass) break;
            passing = q;
        }
        if (ell == 7 && passing != 1) throw internal_error("w2: unexpected 7-part");
        result *= passing;
    }

    // The 2-part is 2^(r+3) with r = 1 iff sqrt2 lies in M; enforced on
    // every call.
    int r = M.contains_class(2) ? 1 : 0;
    long long two_part = result & -result;
    if (two_part != (1LL << (r + 3)))
        throw internal_error("w2: 2-part " + std::to_string(two_part) + " violates the 2^(r+3) law");
    return result;
}

/// 1 iff M contains sqrt2, i.e. M meets the cyclotomic Z2-tower in its
/// first layer.
inline int cyclotomic_layer(const MultiquadField& M) { return M.contains_class(2) ? 1 : 0; }

/// A pair F inside E of multiquadratic fields; exposes Gal(E/F) as a
/// subgroup H of Gal(E/Q) with its own F2 coordinates, and the lifting of
/// characters of H to characters of Gal(E/Q).
class RelativeExtension {
public:
    RelativeExtension(MultiquadField ext, MultiquadField base)
        : ext_(std::move(ext)), base_(std::move(base)) {
        if (!ext_.contains_field(base_))
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "base " + base_.literal() + " is not a subfield of " +
                                          ext_.literal());
        const int m = ext_.rank();
        for (long long g : base_.gens()) u_base_.push_back(*ext_.coordinates_of_class(g));
        h_basis_ = f2::nullspace(u_base_, m);
        for (std::size_t j = 0; j < h_basis_.size(); ++j)
            dual_units_.push_back(
                f2::solve_pairing(h_basis_, std::uint32_t(1) << j, m));
    }

    static RelativeExtension over_rationals(MultiquadField ext) {
        return RelativeExtension(std::move(ext), MultiquadField::rationals());
    }

    const MultiquadField& ext() const { return ext_; }
    const MultiquadField& base() const { return base_; }
    int rel_rank() const { return (int)h_basis_.size(); }

    bool in_gal_subgroup(GroupElement g) const {
        check_ambient(g);
        for (std::uint32_t u : u_base_)
            if (f2::parity(u & g.bits)) return false;
        return true;
    }

    /// H coordinates -> Gal(E/Q) coordinates.
    GroupElement embed(GroupElement h) const {
        if (h.rank != rel_rank()) throw internal_error("embed: rank mismatch");
        std::uint32_t bits = 0;
        for (int j = 0; j < rel_rank(); ++j)
            if ((h.bits >> j) & 1u) bits ^= h_basis_[j];
        return {ext_.rank(), bits};
    }

    /// Gal(E/Q) coordinates -> H coordinates; g must lie in H.
    GroupElement project(GroupElement g) const {
        check_ambient(g);
        if (!in_gal_subgroup(g)) throw internal_error("project: element not in Gal(E/F)");
        std::uint32_t bits = 0;
        for (int j = 0; j < rel_rank(); ++j)
            if (f2::parity(dual_units_[j] & g.bits)) bits |= std::uint32_t(1) << j;
        return {rel_rank(), bits};
    }

    /// The full characters of Gal(E/Q) restricting to chi_w on H; exactly
    /// [F:Q] of them.
    std::vector<std::uint32_t> lifts(std::uint32_t w) const {
        std::uint32_t u0 = 0;
        for (int j = 0; j < rel_rank(); ++j)
            if ((w >> j) & 1u) u0 ^= dual_units_[j];
        std::vector<std::uint32_t> out;
        std::uint32_t n = std::uint32_t(1) << u_base_.size();
        out.reserve(n);
        for (std::uint32_t s = 0; s < n; ++s) {
            std::uint32_t u = u0;
            for (std::size_t i = 0; i < u_base_.size(); ++i)
                if ((s >> i) & 1u) u ^= u_base_[i];
            out.push_back(u);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Squarefree d with E_chi = F(sqrt d), for nontrivial w.
    long long rel_class(std::uint32_t w) const {
        require_nontrivial(w);
        std::uint32_t u0 = 0;
        for (int j = 0; j < rel_rank(); ++j)
            if ((w >> j) & 1u) u0 ^= dual_units_[j];
        return ext_.class_rep(u0);
    }

    /// E_chi, the relative quadratic extension of F cut out by chi_w, as a
    /// field over Q.
    MultiquadField fixed_field(std::uint32_t w) const {
        require_nontrivial(w);
        std::vector<long long> gens = base_.gens();
        gens.push_back(rel_class(w));
        return make_field(gens);
    }

    /// An element of H restricting to the nontrivial automorphism of
    /// E_chi/F (H coordinates).
    GroupElement tau(std::uint32_t w) const {
        require_nontrivial(w);
        return {rel_rank(), std::uint32_t(1) << std::countr_zero(w)};
    }

private:
    void check_ambient(GroupElement g) const {
        if (g.rank != ext_.rank()) throw internal_error("element rank does not match Gal(E/Q)");
    }
    void require_nontrivial(std::uint32_t w) const {
        if (w == 0 || w >= (std::uint32_t(1) << rel_rank()))
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "character index must be nontrivial on Gal(E/F)");
    }

    MultiquadField ext_, base_;
    std::vector<std::uint32_t> u_base_;      // base classes in ext coordinates
    std::vector<std::uint32_t> h_basis_;     // basis of H = Gal(E/F) in Gal(E/Q)
    std::vector<std::uint32_t> dual_units_;  // u_j with <u_j, h_i> = delta_ij
};

/// A prime of the base field F above the rational prime p, for p
/// unramified in E: residue degree f, norm p^f, and the Frobenius of the
/// prime of F as an element of Gal(E/F). All primes of F above p share
/// this data.
struct FPrime {
    long long p = 0;
    int f = 1;
    Int norm = 0;
    GroupElement frob;  // H coordinates
};

inline FPrime prime_of_F(long long p, const RelativeExtension& ext) {
    GroupElement sigma = frobenius_rational(p, ext.ext());
    FPrime q;
    q.p = p;
    if (ext.in_gal_subgroup(sigma)) {
        q.f = 1;
        q.frob = ext.project(sigma);
    } else {
        q.f = 2;
        q.frob = GroupElement{ext.rel_rank(), 0};
    }
    q.norm = pow_int(p, q.f);
    return q;
}

/// Whether E_chi is F(sqrt2), the first layer of the cyclotomic Z2-tower
/// over F. (When sqrt2 already lies in F the true first layer is not
/// multiquadratic, so the answer is false for every chi.)
inline bool is_first_layer(std::uint32_t w, const RelativeExtension& ext) {
    long long d = ext.rel_class(w);
    return ext.base().contains_class(SquareClass::mul_reps(2, d));
}

}  // namespace tamekit
