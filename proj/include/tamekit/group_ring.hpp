#pragma once

// Exact arithmetic in Q[G] for G elementary abelian of rank m. Group
// elements and characters are both F2 vectors of length m; composition is
// XOR and the pairing chi_u(gamma_v) = (-1)^<u,v> drives the character
// transform, a 2^m-point Walsh-Hadamard butterfly over the rationals.
// Elements are stored densely: 2^m coefficients indexed by bit pattern.

#include <tamekit/errors.hpp>
#include <tamekit/rational.hpp>

#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace tamekit {

struct GroupElement {
    int rank = 0;
    std::uint32_t bits = 0;

    bool is_identity() const { return bits == 0; }

    friend GroupElement operator*(GroupElement a, GroupElement b) {
        if (a.rank != b.rank) throw internal_error("group element rank mismatch");
        return {a.rank, a.bits ^ b.bits};
    }
    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

struct CharacterIndex {
    int rank = 0;
    std::uint32_t bits = 0;

    bool is_principal() const { return bits == 0; }
    friend bool operator==(const CharacterIndex&, const CharacterIndex&) = default;
};

/// chi_u(gamma_v) = (-1)^<u,v> with <,> the F2 inner product.
inline int char_value(CharacterIndex u, GroupElement v) {
    if (u.rank != v.rank) throw internal_error("character/element rank mismatch");
    return (std::popcount(u.bits & v.bits) & 1) ? -1 : 1;
}

struct IntegralityReport {
    bool integral = false;
    Int denominator_lcm = 1;
};

class GroupRingElem {
public:
    GroupRingElem() : rank_(0), coeffs_(1) {}
    explicit GroupRingElem(int rank) : rank_(check_rank(rank)), coeffs_(std::size_t(1) << rank) {}
    GroupRingElem(int rank, std::vector<Rational> coeffs)
        : rank_(check_rank(rank)), coeffs_(std::move(coeffs)) {
        if (coeffs_.size() != (std::size_t(1) << rank_))
            throw internal_error("group ring element: wrong coefficient count");
    }

    static GroupRingElem scalar(int rank, Rational c) {
        GroupRingElem x(rank);
        x.coeffs_[0] = std::move(c);
        return x;
    }

    static GroupRingElem basis(GroupElement g) {
        GroupRingElem x(g.rank);
        x.coeffs_[g.bits] = 1;
        return x;
    }

    /// T_G = sum over all of G.
    static GroupRingElem group_sum(int rank) {
        GroupRingElem x(rank);
        for (auto& c : x.coeffs_) c = 1;
        return x;
    }

    /// Sum over ker(chi_u); for u = 0 this is all of G.
    static GroupRingElem kernel_sum(CharacterIndex u) {
        GroupRingElem x(u.rank);
        for (std::uint32_t v = 0; v < x.size(); ++v)
            if ((std::popcount(u.bits & v) & 1) == 0) x.coeffs_[v] = 1;
        return x;
    }

    /// e_chi = 2^-m sum_gamma chi(gamma) gamma^-1 (gamma self-inverse here).
    static GroupRingElem idempotent(CharacterIndex u) {
        GroupRingElem x(u.rank);
        Rational unit(Int(1), Int(1) << u.rank);
        for (std::uint32_t v = 0; v < x.size(); ++v)
            x.coeffs_[v] = char_value(u, {u.rank, v}) > 0 ? unit : -unit;
        return x;
    }

    /// Inverse character transform: the element whose chi_u-value is vals[u]
    /// for every u, i.e. sum_u vals[u] e_{chi_u}. vals must have 2^rank
    /// entries, indexed by character bit pattern.
    static GroupRingElem from_character_values(int rank, std::vector<Rational> vals) {
        check_rank(rank);
        if (vals.size() != (std::size_t(1) << rank))
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "character transform: missing character value");
        hadamard(vals);
        Int scale = Int(1) << rank;
        for (auto& c : vals) c /= scale;
        return GroupRingElem(rank, std::move(vals));
    }

    int rank() const { return rank_; }
    std::uint32_t size() const { return std::uint32_t(1) << rank_; }

    const Rational& coeff(std::uint32_t bits) const { return coeffs_.at(bits); }
    const Rational& coeff(GroupElement g) const {
        if (g.rank != rank_) throw internal_error("coefficient lookup rank mismatch");
        return coeffs_[g.bits];
    }
    void set_coeff(std::uint32_t bits, Rational c) { coeffs_.at(bits) = std::move(c); }
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (c != 0) return false;
        return true;
    }

    /// Forward transform: vals[u] = chi_u applied coefficientwise.
    std::vector<Rational> character_values() const {
        std::vector<Rational> v = coeffs_;
        hadamard(v);
        return v;
    }

    IntegralityReport is_integral() const {
        IntegralityReport r;
        r.denominator_lcm = 1;
        for (const auto& c : coeffs_) r.denominator_lcm = lcm(r.denominator_lcm, den(c));
        r.integral = (r.denominator_lcm == 1);
        return r;
    }

    GroupRingElem& operator+=(const GroupRingElem& o) {
        check_same(o);
        for (std::uint32_t i = 0; i < size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    GroupRingElem& operator-=(const GroupRingElem& o) {
        check_same(o);
        for (std::uint32_t i = 0; i < size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    GroupRingElem& operator*=(const Rational& s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }

    friend GroupRingElem operator+(GroupRingElem a, const GroupRingElem& b) { return a += b; }
    friend GroupRingElem operator-(GroupRingElem a, const GroupRingElem& b) { return a -= b; }
    friend GroupRingElem operator*(GroupRingElem a, const Rational& s) { return a *= s; }
    friend GroupRingElem operator*(const Rational& s, GroupRingElem a) { return a *= s; }
    friend GroupRingElem operator-(GroupRingElem a) {
        for (auto& c : a.coeffs_) c = -c;
        return a;
    }

    /// Multiplication by a group element permutes coefficients by XOR.
    GroupRingElem translated(GroupElement g) const {
        if (g.rank != rank_) throw internal_error("translation rank mismatch");
        GroupRingElem out(rank_);
        for (std::uint32_t v = 0; v < size(); ++v) out.coeffs_[v ^ g.bits] = coeffs_[v];
        return out;
    }

    friend GroupRingElem operator*(const GroupRingElem& a, const GroupRingElem& b) {
        a.check_same(b);
        GroupRingElem out(a.rank_);
        for (std::uint32_t u = 0; u < a.size(); ++u) {
            if (a.coeffs_[u] == 0) continue;
            for (std::uint32_t v = 0; v < b.size(); ++v) {
                if (b.coeffs_[v] == 0) continue;
                out.coeffs_[u ^ v] += a.coeffs_[u] * b.coeffs_[v];
            }
        }
        return out;
    }

    friend bool operator==(const GroupRingElem& a, const GroupRingElem& b) {
        return a.rank_ == b.rank_ && a.coeffs_ == b.coeffs_;
    }

    /// Canonical text form: all 2^m coefficients, identity first, e.g.
    /// "-1/30 + 11/30*g1". Products of generators concatenate: "g1g2".
    std::string to_text() const {
        std::ostringstream os;
        for (std::uint32_t v = 0; v < size(); ++v) {
            if (v) os << " + ";
            os << to_string(coeffs_[v]);
            if (v) os << '*' << generator_label(v);
        }
        return os.str();
    }

    static GroupRingElem from_text(const std::string& text);

    std::vector<std::string> to_coeff_strings() const {
        std::vector<std::string> out;
        out.reserve(size());
        for (const auto& c : coeffs_) out.push_back(to_string(c));
        return out;
    }

    static std::string generator_label(std::uint32_t bits) {
        std::string s;
        for (int i = 0; bits; ++i, bits >>= 1)
            if (bits & 1u) s += "g" + std::to_string(i + 1);
        return s;
    }

private:
    static int check_rank(int rank) {
        if (rank < 0 || rank > 20) throw internal_error("group ring rank out of range");
        return rank;
    }
    void check_same(const GroupRingElem& o) const {
        if (rank_ != o.rank_) throw internal_error("group ring rank mismatch");
    }

    // In-place Walsh-Hadamard butterfly; involutive up to a factor 2^m.
    static void hadamard(std::vector<Rational>& v) {
        for (std::size_t half = 1; half < v.size(); half <<= 1) {
            for (std::size_t base = 0; base < v.size(); base += 2 * half) {
                for (std::size_t j = base; j < base + half; ++j) {
                    Rational a = v[j] + v[j + half];
                    Rational b = v[j] - v[j + half];
                    v[j] = std::move(a);
                    v[j + half] = std::move(b);
                }
            }
        }
    }

    int rank_;
    std::vector<Rational> coeffs_;
};

inline GroupRingElem GroupRingElem::from_text(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        auto next = text.find(" + ", pos);
        if (next == std::string::npos) {
            parts.push_back(text.substr(pos));
            break;
        }
        parts.push_back(text.substr(pos, next - pos));
        pos = next + 3;
    }
    int rank = 0;
    while ((std::size_t(1) << rank) < parts.size()) ++rank;
    if ((std::size_t(1) << rank) != parts.size())
        throw admissibility_error(admissibility_error::reason::bad_input,
                                  "group ring text: term count is not a power of two");
    GroupRingElem out(rank);
    for (std::uint32_t v = 0; v < parts.size(); ++v) {
        std::string term = parts[v];
        if (v) {
            std::string suffix = "*" + generator_label(v);
            if (term.size() <= suffix.size() || term.substr(term.size() - suffix.size()) != suffix)
                throw admissibility_error(admissibility_error::reason::bad_input,
                                          "group ring text: bad term '" + term + "'");
            term = term.substr(0, term.size() - suffix.size());
        }
        out.set_coeff(v, parse_rational(term));
    }
    return out;
}

}  // namespace tamekit
