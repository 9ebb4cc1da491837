#pragma once

// Stickelberger elements at s = -1 with exact rational coefficients.
//
// For an extension E/F of multiquadratic fields with group H = Gal(E/F),
// theta is assembled from its character values: the chi-component is
// L^S(-1, chi), computed as the product of the truncated Dirichlet
// L-values of the [F:Q] characters of Gal(E/Q) lifting chi. S is always
// given as a set of rational primes (a Galois-stable set of primes of F),
// which keeps every Euler factor a Kronecker-symbol expression.

#include <tamekit/dirichlet.hpp>
#include <tamekit/errors.hpp>
#include <tamekit/fields.hpp>
#include <tamekit/group_ring.hpp>
#include <tamekit/rational.hpp>

#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace tamekit {

/// The finite part of S; the infinite places are always implied.
struct SConfig {
    std::set<long long> sfin;

    bool contains(long long p) const { return sfin.count(p) != 0; }
    friend bool operator==(const SConfig&, const SConfig&) = default;
};

/// The smallest admissible S for E: exactly the ramified primes.
inline SConfig minimal_s(const MultiquadField& E) { return SConfig{E.ramified_primes()}; }

inline void require_s_covers_ramified(const MultiquadField& E, const SConfig& S) {
    for (long long p : E.ramified_primes())
        if (!S.contains(p))
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "S is missing the ramified prime " + std::to_string(p) +
                                          " of " + E.literal());
}

/// Memoized w2; certificates ask for the same handful of fields over and
/// over across a sweep.
inline long long w2_cached(const MultiquadField& M) {
    static std::map<std::vector<long long>, long long> memo;
    static std::mutex mutex;
    {
        std::lock_guard lock(mutex);
        auto it = memo.find(M.gens());
        if (it != memo.end()) return it->second;
    }
    long long value = w2(M);
    std::lock_guard lock(mutex);
    memo.emplace(M.gens(), value);
    return value;
}

namespace detail {

/// prod over all characters of Gal(F/Q) of L^S(-1, psi); no gate on S.
inline Rational zeta_s_core(const MultiquadField& F, const SConfig& S) {
    Rational z = 1;
    for (std::uint32_t u = 0; u < F.degree(); ++u) z *= l_minus1_truncated(F.character(u), S.sfin);
    return z;
}

}  // namespace detail

/// zeta_F^S(-1), exactly. Requires S to contain the primes ramifying in F,
/// matching the truncation used for theta.
inline Rational zeta_s_minus1(const MultiquadField& F, const SConfig& S) {
    require_s_covers_ramified(F, S);
    return detail::zeta_s_core(F, S);
}

struct ThetaElem {
    GroupRingElem elem;        // over Gal(E/F)
    RelativeExtension context;
    SConfig s;
};

/// theta_{E/F}^S(-1): the element of Q[Gal(E/F)] whose chi-component is
/// L^S(-1, chi).
inline ThetaElem theta(const RelativeExtension& ext, const SConfig& S) {
    require_s_covers_ramified(ext.ext(), S);
    const int h = ext.rel_rank();
    std::vector<Rational> vals(std::size_t(1) << h);
    for (std::uint32_t w = 0; w < vals.size(); ++w) {
        Rational v = 1;
        for (std::uint32_t u : ext.lifts(w))
            v *= l_minus1_truncated(ext.ext().character(u), S.sfin);
        vals[w] = std::move(v);
    }
    return ThetaElem{GroupRingElem::from_character_values(h, std::move(vals)), ext, S};
}

struct DeligneRibetReport {
    bool pass = false;
    long long w2_ext = 0;
    GroupRingElem scaled;  // w2(E) * theta, integral when pass
};

/// w2(E) * theta lies in Z[Gal(E/F)]; a failure would be a bug, and is
/// reported rather than thrown so sweeps can ledger it.
inline DeligneRibetReport deligne_ribet_check(const RelativeExtension& ext, const SConfig& S) {
    DeligneRibetReport r;
    r.w2_ext = w2_cached(ext.ext());
    r.scaled = theta(ext, S).elem * Rational(r.w2_ext);
    r.pass = r.scaled.is_integral().integral;
    return r;
}

inline void require_admissible_q(const RelativeExtension& ext, const SConfig& S, long long p) {
    if (S.contains(p))
        throw admissibility_error(admissibility_error::reason::q_in_s,
                                  "q=" + std::to_string(p) + " lies in S");
    long long w = w2_cached(ext.ext());
    if (w % p == 0)
        throw admissibility_error(admissibility_error::reason::q_divides_w2,
                                  "q=" + std::to_string(p) + " divides w2(E)=" + std::to_string(w));
}

/// alpha^S(q,1) = (Nq^2 - sigma_q) theta^S(-1), integral in Z[Gal(E/F)].
inline GroupRingElem alpha(const RelativeExtension& ext, const SConfig& S, const FPrime& q) {
    require_admissible_q(ext, S, q.p);
    GroupRingElem th = theta(ext, S).elem;
    GroupRingElem out = th * Rational(q.norm * q.norm) - th.translated(q.frob);
    if (!out.is_integral().integral)
        throw internal_error("alpha is not integral for q=" + std::to_string(q.p) +
                             ", E=" + ext.ext().literal());
    return out;
}

/// Convenience overload taking the rational prime under q.
inline GroupRingElem alpha(const RelativeExtension& ext, const SConfig& S, long long p) {
    require_admissible_q(ext, S, p);
    return alpha(ext, S, prime_of_F(p, ext));
}

struct SinnottReport {
    std::vector<long long> primes;   // rational primes actually used
    std::vector<Int> running;        // gcd after each prime
    Int final_gcd = 0;
    long long w2_base = 0;
    bool stabilized = false;         // final gcd equals w2(F)
    bool never_below = true;         // every running gcd divisible by w2(F)
};

/// Accumulates gcd(Nq^2 - 1) over the primes q of F with p <= bound and
/// p coprime to w2(F)*C; the gcd stabilizes at w2(F). Ramified rational
/// primes are excluded (equivalent to enlarging C).
inline SinnottReport sinnott_gcd(const MultiquadField& F, long long bound, long long C = 1) {
    SinnottReport rep;
    rep.w2_base = w2_cached(F);
    RelativeExtension trivial(F, F);
    Int g = 0;
    std::set<long long> ramified = F.ramified_primes();
    for (long long p = 2; p <= bound; ++p) {
        bool prime = p >= 2;
        for (long long d = 2; d * d <= p && prime; ++d)
            if (p % d == 0) prime = false;
        if (!prime) continue;
        if ((rep.w2_base * C) % p == 0) continue;
        if (ramified.count(p)) continue;
        FPrime q = prime_of_F(p, trivial);
        g = gcd(g, q.norm * q.norm - 1);
        rep.primes.push_back(p);
        rep.running.push_back(g);
        if (g % rep.w2_base != 0) rep.never_below = false;
    }
    rep.final_gcd = g;
    rep.stabilized = (g == rep.w2_base);
    return rep;
}

}  // namespace tamekit
