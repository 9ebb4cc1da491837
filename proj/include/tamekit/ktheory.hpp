#pragma once

// Order predictions for tame kernels and the certificate machinery built
// on them. Every "K2 order" here is the Birch-Tate prediction
// w2(F) * |zeta_F^S(-1)|, never an actual K-group computation; for the
// fields in scope (abelian over Q) the prediction is a theorem, and the
// odd part is unconditional for all F.

#include <tamekit/dirichlet.hpp>
#include <tamekit/errors.hpp>
#include <tamekit/fields.hpp>
#include <tamekit/group_ring.hpp>
#include <tamekit/rational.hpp>
#include <tamekit/stickelberger.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tamekit {

/// Places of F above S: all infinite places (F is totally real, so
/// [F:Q] of them) plus the primes of F above each finite member of S.
inline long long count_places_above(const MultiquadField& F, const SConfig& S) {
    long long n = F.degree();
    for (long long p : S.sfin) n += splitting(p, F).g;
    return n;
}

/// Birch-Tate order prediction for K2 of the S-integers of F.
struct BTOrder {
    Int order = 0;               // w2(F) * |zeta_F^S(-1)|
    Rational zeta;               // zeta_F^S(-1)
    long long places_above_s = 0;
    bool integral_ok = false;    // the predicted order is an integer
    bool sign_ok = false;        // sign(zeta^S) = (-1)^{places above S}
    bool factorization_ok = false;  // order(S) = order(empty) * prod (Np - 1)

    bool ok() const { return integral_ok && sign_ok && factorization_ok; }
};

inline BTOrder bt_order(const MultiquadField& F, const SConfig& S) {
    require_s_covers_ramified(F, S);
    BTOrder r;
    r.zeta = detail::zeta_s_core(F, S);
    long long w = w2_cached(F);
    Rational raw = Rational(w) * abs(r.zeta);
    r.integral_ok = is_integer(raw);
    if (r.integral_ok) r.order = num(raw);
    r.places_above_s = count_places_above(F, S);
    r.sign_ok = sign_of(r.zeta) == ((r.places_above_s % 2) ? -1 : 1);

    // Localization: adding a finite prime p of residue data (f, g)
    // multiplies the order by (p^f - 1)^g.
    Rational raw0 = Rational(w) * abs(detail::zeta_s_core(F, SConfig{}));
    Rational factor = 1;
    for (long long p : S.sfin) {
        Splitting sp = splitting(p, F);
        Int t = pow_int(p, sp.f) - 1;
        for (int i = 0; i < sp.g; ++i) factor *= Rational(t);
    }
    r.factorization_ok = (raw == raw0 * factor);
    return r;
}

namespace detail {

inline long long mod_ll(const Int& x, long long p) {
    long long v = (x % p).convert_to<long long>();
    return v < 0 ? v + p : v;
}

inline long long mulmod(long long a, long long b, long long p) {
    return (long long)((__int128)a * b % p);
}

inline long long powmod(long long a, long long e, long long p) {
    long long r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

inline long long invmod(long long a, long long p) { return powmod(a, p - 2, p); }

inline int strip_p(Int& x, long long p) {
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

}  // namespace detail

/// The tame symbol (a,b)_p = (-1)^{v(a)v(b)} a^{v(b)} / b^{v(a)} mod p,
/// a unit of Z/p, returned as a residue in [1, p).
inline long long tame_symbol(const Rational& a, const Rational& b, long long p) {
    if (a == 0 || b == 0)
        throw admissibility_error(admissibility_error::reason::bad_input,
                                  "tame symbol arguments must be nonzero");
    Int an = num(a), ad = den(a), bn = num(b), bd = den(b);
    long long va = detail::strip_p(an, p) - detail::strip_p(ad, p);
    long long vb = detail::strip_p(bn, p) - detail::strip_p(bd, p);
    long long ua = detail::mulmod(detail::mod_ll(an, p), detail::invmod(detail::mod_ll(ad, p), p), p);
    long long ub = detail::mulmod(detail::mod_ll(bn, p), detail::invmod(detail::mod_ll(bd, p), p), p);
    auto pow_signed = [p](long long base, long long e) {
        if (e < 0) {
            base = detail::invmod(base, p);
            e = -e;
        }
        return detail::powmod(base, e, p);
    };
    long long r = ((va & 1) && (vb & 1)) ? p - 1 : 1;
    r = detail::mulmod(r, pow_signed(ua, vb), p);
    r = detail::mulmod(r, pow_signed(ub, -va), p);
    return r;
}

struct TameSymbolReport {
    long long p_max = 97;
    int samples = 200;
    std::uint64_t seed = 0;
    long long checks = 0;
    long long failures = 0;
    bool pass = false;
};

/// Samples the defining identities of the tame symbol: bilinearity,
/// Steinberg vanishing (a, 1-a)_p = 1, (-1,-1)_p = 1, and surjectivity of
/// (p, .)_p onto the units mod p. Deterministic for a fixed seed.
inline TameSymbolReport tame_symbol_checks(long long p_max = 97, int samples = 200,
                                           std::uint64_t seed = 0) {
    TameSymbolReport rep;
    rep.p_max = p_max;
    rep.samples = samples;
    rep.seed = seed;
    for (long long p = 2; p <= p_max; ++p) {
        bool prime = true;
        for (long long d = 2; d * d <= p; ++d)
            if (p % d == 0) prime = false;
        if (!prime) continue;

        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + (std::uint64_t)p);
        std::uniform_int_distribution<long long> small(-40, 40);
        std::uniform_int_distribution<long long> positive(1, 40);
        std::uniform_int_distribution<int> pexp(-2, 2);
        auto random_rational = [&]() {
            long long n = 0;
            while (n == 0) n = small(rng);
            Rational r(n, positive(rng));
            int e = pexp(rng);
            for (int i = 0; i < e; ++i) r *= p;
            for (int i = 0; i > e; --i) r /= p;
            return r;
        };

        for (int s = 0; s < samples; ++s) {
            Rational a = random_rational(), b1 = random_rational(), b2 = random_rational();
            ++rep.checks;
            if (tame_symbol(a, b1 * b2, p) !=
                detail::mulmod(tame_symbol(a, b1, p), tame_symbol(a, b2, p), p))
                ++rep.failures;
            Rational x = random_rational();
            if (x != 0 && x != 1) {
                ++rep.checks;
                if (tame_symbol(x, 1 - x, p) != 1) ++rep.failures;
            }
        }
        ++rep.checks;
        if (tame_symbol(Rational(-1), Rational(-1), p) != 1) ++rep.failures;

        std::set<long long> image;
        for (long long u = 1; u < p; ++u) image.insert(tame_symbol(Rational(p), Rational(u), p));
        ++rep.checks;
        if ((long long)image.size() != p - 1) ++rep.failures;
    }
    rep.pass = rep.failures == 0;
    return rep;
}

/// Ranks over F2 of Gamma_Q^S / squares and of the 2-torsion of the
/// predicted K2(Z^S): Gamma is generated by -1 and the primes of
/// S_fin union {2}; the K-rank drops by one (the class of 2 dies, Q(sqrt2)
/// being the first cyclotomic Z2-layer). Base field Q only.
struct GammaRank {
    int gamma_rank = 0;
    int k_rank = 0;
};

inline GammaRank gamma_rank(const SConfig& S) {
    std::set<long long> gens = S.sfin;
    gens.insert(2);
    int g = 1 + (int)gens.size();
    return {g, g - 1};
}

/// The annihilation-exponent switch: 0 when E(sqrt -1) is strictly smaller
/// than the maximal multiquadratic extension of the base unramified
/// outside S and 2, i.e. full annihilation; 1 otherwise (annihilation
/// after doubling). Computable over base Q; other bases take an override
/// or fall back to the safe value 1.
struct DeltaResult {
    int value = 1;
    bool assumed = false;
};

inline DeltaResult delta_switch(const MultiquadField& E, const SConfig& S,
                                const MultiquadField& base = MultiquadField::rationals(),
                                std::optional<int> override_value = std::nullopt) {
    if (override_value) {
        if (*override_value != 0 && *override_value != 1)
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "delta override must be 0 or 1");
        return {*override_value, false};
    }
    if (base.is_rationals()) {
        std::set<long long> gens = S.sfin;
        gens.insert(2);
        return {E.rank() < (int)gens.size() ? 0 : 1, false};
    }
    return {1, true};
}

/// w2 divisibility for a relative quadratic E/F at an admissible q:
/// split case w2(E) | Nq^2 - 1, inert case w2(E) | (Nq^2 + 1) w2(F).
struct W2Divisibility {
    bool pass = false;
    bool split = false;
    Int quotient = 0;
};

inline W2Divisibility w2_divisibility(const MultiquadField& Echi, const MultiquadField& base,
                                      const FPrime& q, bool split) {
    long long wE = w2_cached(Echi);
    if (wE % q.p == 0)
        throw admissibility_error(admissibility_error::reason::q_divides_w2,
                                  "q=" + std::to_string(q.p) +
                                      " divides w2=" + std::to_string(wE));
    Int n2 = q.norm * q.norm;
    Int lhs = split ? Int(n2 - 1) : Int((n2 + 1) * w2_cached(base));
    W2Divisibility out;
    out.split = split;
    out.pass = (lhs % wE == 0);
    out.quotient = lhs / wE;
    return out;
}

/// Order of the kernel of the base-change map K2(O_F^S) -> K2(O_E^S) for
/// relative quadratic E = E_chi over F: 1 exactly when E_chi = F(sqrt2),
/// else 2.
inline int ker_iota_order(std::uint32_t w, const RelativeExtension& ext) {
    return is_first_layer(w, ext) ? 1 : 2;
}

/// (Nq^2 - psi(sigma_q)) w2(F) / (|ker iota| w2(E)), an integer for
/// admissible q; psi is +-1 according to q splitting in E_chi/F.
struct TermWitness {
    bool integral = false;
    Int witness = 0;
    Rational raw;
};

inline TermWitness character_term_witness(const MultiquadField& Echi, const MultiquadField& base,
                                          const FPrime& q, int psi, int ker) {
    TermWitness out;
    out.raw = Rational((q.norm * q.norm - psi) * w2_cached(base), Int(ker) * w2_cached(Echi));
    out.integral = is_integer(out.raw);
    if (out.integral) out.witness = num(out.raw);
    return out;
}

/// 2-rank bound check over base Q: the predicted 2-rank of K2(Z-S)
/// dominates m, and m + 1 when delta = 0.
struct RankCheck {
    int gamma = 0;
    int k = 0;
    int m = 0;
    int delta_value = 1;
    bool pass = false;
};

inline RankCheck kummer_rank_check(const MultiquadField& E, const SConfig& S) {
    RankCheck r;
    GammaRank gr = gamma_rank(S);
    r.gamma = gr.gamma_rank;
    r.k = gr.k_rank;
    r.m = E.rank();
    r.delta_value = delta_switch(E, S).value;
    r.pass = r.k >= r.m + 1 - r.delta_value;
    return r;
}

/// One verified character column of a certificate.
struct CharCheck {
    long long discriminant = 0;  // of the relative class cutting out E_chi
    bool split = false;
    bool w2_div_ok = false;      // split/inert w2 divisibility
    int ker_iota = 2;
    Int term_witness = 0;
    bool term_witness_ok = false;
    Int residual = 0;            // 2^delta |K2 E_chi| |ker| / (2^m |K2 F|)
    bool residual_ok = false;
    Int transfer_ratio = 0;      // |K2 E_chi| / |K2 F|
    bool transfer_ratio_ok = false;
    bool second_term_integral = false;
};

/// The full verdict record for one (E/F, S, q) triple. Assembles every
/// numerically checkable ingredient of the annihilation argument; no
/// check aborts the others.
struct Certificate {
    std::vector<long long> ext_gens, base_gens;
    std::vector<long long> sfin;
    long long q_p = 0;
    int q_f = 1;
    int delta = 1;
    bool delta_assumed = false;
    std::string alpha_text;
    bool alpha_integral = false;
    bool doubled_alpha_integral = false;
    bool bt_orders_ok = false;
    Int first_term_witness = 0;
    bool first_term_ok = false;
    std::vector<CharCheck> characters;
    bool decomposition_match = false;
    bool pass = false;
};

/// Everything about (E/F, S) that certificates share across q: theta, the
/// w2 values, the Birch-Tate orders of the base and of every relative
/// quadratic slice, and the prebuilt character terms of the decomposition.
class CertificateContext {
public:
    CertificateContext(RelativeExtension ext, SConfig s,
                       std::optional<int> delta_override = std::nullopt)
        : ext_(std::move(ext)), s_(std::move(s)) {
        require_s_covers_ramified(ext_.ext(), s_);
        th_ = theta(ext_, s_).elem;
        w2_base_ = w2_cached(ext_.base());
        bt_base_ = bt_order(ext_.base(), s_);
        if (!bt_base_.integral_ok)
            throw internal_error("Birch-Tate order for " + ext_.base().literal() +
                                 " is not an integer");
        DeltaResult d = delta_switch(ext_.ext(), s_, ext_.base(), delta_override);
        delta_ = d.value;
        delta_assumed_ = d.assumed;
        sign_base_ = (count_places_above(ext_.base(), s_) % 2) ? -1 : 1;
        const int h = ext_.rel_rank();
        t_full_ = GroupRingElem::group_sum(h);

        for (std::uint32_t w = 1; w < (std::uint32_t(1) << h); ++w) {
            CharData cd;
            cd.w = w;
            cd.field = ext_.fixed_field(w);
            cd.disc = fundamental_discriminant(ext_.rel_class(w));
            cd.w2 = w2_cached(cd.field);
            cd.bt = bt_order(cd.field, s_);
            if (!cd.bt.integral_ok)
                throw internal_error("Birch-Tate order for " + cd.field.literal() +
                                     " is not an integer");
            cd.ker = ker_iota_order(w, ext_);
            cd.sign = (count_places_above(cd.field, s_) % 2) ? -1 : 1;
            Rational scale = Rational(cd.sign) * Rational(w2_base_, cd.w2) *
                             Rational(cd.bt.order, (Int(1) << h) * bt_base_.order);
            GroupRingElem t_chi = GroupRingElem::kernel_sum({h, w});
            GroupRingElem y = t_chi - t_chi.translated(ext_.tau(w));
            cd.term = y * scale;
            cd.residual_raw = Rational((Int(1) << delta_) * cd.bt.order * cd.ker,
                                       (Int(1) << h) * bt_base_.order);
            cd.transfer_ratio_raw = Rational(cd.bt.order, bt_base_.order);
            chars_.push_back(std::move(cd));
        }
    }

    const RelativeExtension& ext() const { return ext_; }
    const SConfig& s() const { return s_; }
    const GroupRingElem& theta_elem() const { return th_; }
    int delta_value() const { return delta_; }
    const BTOrder& bt_base() const { return bt_base_; }

    GroupRingElem alpha_at(const FPrime& q) const {
        Int n2 = q.norm * q.norm;
        return th_ * Rational(n2) - th_.translated(q.frob);
    }

    /// Both sides of the character decomposition of (-1)^{|S_F|} alpha.
    std::pair<GroupRingElem, GroupRingElem> decomposition_sides(const FPrime& q,
                                                                const GroupRingElem& al) const {
        const int h = ext_.rel_rank();
        Int n2 = q.norm * q.norm;
        GroupRingElem lhs = al * Rational(sign_base_);
        GroupRingElem rhs =
            t_full_ * (Rational(n2 - 1, w2_base_) * Rational(bt_base_.order, Int(1) << h));
        for (const CharData& cd : chars_)
            rhs += cd.term * Rational(n2) - cd.term.translated(q.frob);
        return {std::move(lhs), std::move(rhs)};
    }

    Certificate certify(const FPrime& q) const {
        require_admissible_q(ext_, s_, q.p);
        const int h = ext_.rel_rank();
        Certificate cert;
        cert.ext_gens = ext_.ext().gens();
        cert.base_gens = ext_.base().gens();
        cert.sfin.assign(s_.sfin.begin(), s_.sfin.end());
        cert.q_p = q.p;
        cert.q_f = q.f;
        cert.delta = delta_;
        cert.delta_assumed = delta_assumed_;

        Int n2 = q.norm * q.norm;
        GroupRingElem al = alpha_at(q);
        cert.alpha_integral = al.is_integral().integral;
        cert.alpha_text = al.to_text();
        cert.doubled_alpha_integral =
            (al * Rational(Int(1) << delta_)).is_integral().integral;

        Rational first = Rational(n2 - 1, w2_base_) *
                         Rational((Int(1) << delta_) * bt_base_.order, Int(1) << h);
        cert.first_term_ok = is_integer(first);
        if (cert.first_term_ok) cert.first_term_witness = num(first);

        bool bt_ok = bt_base_.ok();
        bool chars_ok = true;
        for (const CharData& cd : chars_) {
            int psi = char_value({h, cd.w}, q.frob);
            CharCheck cc;
            cc.discriminant = cd.disc;
            cc.split = (psi == 1);
            Int div_lhs = cc.split ? Int(n2 - 1) : Int((n2 + 1) * w2_base_);
            cc.w2_div_ok = (div_lhs % cd.w2 == 0);
            cc.ker_iota = cd.ker;
            Rational witness = Rational((n2 - psi) * w2_base_, Int(cd.ker) * cd.w2);
            cc.term_witness_ok = is_integer(witness);
            if (cc.term_witness_ok) cc.term_witness = num(witness);
            cc.residual_ok = is_integer(cd.residual_raw);
            if (cc.residual_ok) cc.residual = num(cd.residual_raw);
            cc.transfer_ratio_ok = is_integer(cd.transfer_ratio_raw);
            if (cc.transfer_ratio_ok) cc.transfer_ratio = num(cd.transfer_ratio_raw);
            cc.second_term_integral = cc.term_witness_ok && cc.residual_ok;
            bt_ok = bt_ok && cd.bt.ok();
            chars_ok = chars_ok && cc.w2_div_ok && cc.second_term_integral &&
                       cc.transfer_ratio_ok;
            cert.characters.push_back(std::move(cc));
        }
        cert.bt_orders_ok = bt_ok;

        auto [lhs, rhs] = decomposition_sides(q, al);
        cert.decomposition_match = (lhs == rhs);

        cert.pass = cert.alpha_integral && cert.doubled_alpha_integral && cert.bt_orders_ok &&
                    cert.first_term_ok && chars_ok && cert.decomposition_match;
        return cert;
    }

private:
    struct CharData {
        std::uint32_t w = 0;
        MultiquadField field = MultiquadField::rationals();
        long long disc = 1;
        long long w2 = 0;
        BTOrder bt;
        int ker = 2;
        int sign = 1;
        GroupRingElem term;          // scale * (1 - tau) T_{E/E_chi}
        Rational residual_raw;
        Rational transfer_ratio_raw;
    };

    RelativeExtension ext_;
    SConfig s_;
    GroupRingElem th_;
    GroupRingElem t_full_;
    long long w2_base_ = 0;
    BTOrder bt_base_;
    int delta_ = 1;
    bool delta_assumed_ = false;
    int sign_base_ = 1;
    std::vector<CharData> chars_;
};

struct DecompositionReport {
    bool match = false;
    GroupRingElem lhs, rhs;
};

/// Verifies the exact character decomposition of (-1)^{|S_F|} alpha into
/// the principal term and the relative quadratic terms weighted by
/// Birch-Tate orders.
inline DecompositionReport decomposition_report(const RelativeExtension& ext, const SConfig& S,
                                                const FPrime& q) {
    require_admissible_q(ext, S, q.p);
    CertificateContext ctx(ext, S);
    GroupRingElem al = ctx.alpha_at(q);
    auto [lhs, rhs] = ctx.decomposition_sides(q, al);
    DecompositionReport rep;
    rep.match = (lhs == rhs);
    rep.lhs = std::move(lhs);
    rep.rhs = std::move(rhs);
    return rep;
}

inline Certificate annihilation_certificate(const RelativeExtension& ext, const SConfig& S,
                                            const FPrime& q,
                                            std::optional<int> delta_override = std::nullopt) {
    return CertificateContext(ext, S, delta_override).certify(q);
}

}  // namespace tamekit
