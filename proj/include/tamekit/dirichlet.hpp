#pragma once

// Quadratic Dirichlet characters, realized as Kronecker symbols attached to
// fundamental discriminants, and the exact value of the attached L-series
// at s = -1:
//
//   B_{2,chi} = f * sum_{a=1..f} chi(a) B2(a/f),  B2(x) = x^2 - x + 1/6,
//   L(-1,chi) = -B_{2,chi}/2,
//
// with the S-truncated value multiplying in (1 - chi(p) p) for p in S.
// The Bernoulli sum clears denominators: B_{2,chi} = sum chi(a)(6a^2 - 6af
// + f^2) / (6f), so the accumulation is pure integer arithmetic.

#include <tamekit/errors.hpp>
#include <tamekit/rational.hpp>

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>

namespace tamekit {

inline bool is_squarefree(long long d) {
    d = std::llabs(d);
    if (d == 0) return false;
    for (long long q = 2; q * q <= d; ++q)
        if (d % (q * q) == 0) return false;
    return true;
}

/// Kronecker symbol (a|n), fully extended (n may be 0, negative or even).
inline int kronecker(long long a, long long n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if (a % 2 == 0 && n % 2 == 0) return 0;
    int k = 1;
    int twos = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++twos;
    }
    if (twos & 1) {
        long long r = ((a % 8) + 8) % 8;
        if (r == 3 || r == 5) k = -k;
    }
    if (n < 0) {
        n = -n;
        if (a < 0) k = -k;
    }
    // n now positive odd; standard reciprocity loop.
    a %= n;
    if (a < 0) a += n;
    while (a != 0) {
        twos = 0;
        while (a % 2 == 0) {
            a /= 2;
            ++twos;
        }
        if (twos & 1) {
            long long r = n % 8;
            if (r == 3 || r == 5) k = -k;
        }
        if (a % 4 == 3 && n % 4 == 3) k = -k;
        long long t = n % a;
        n = a;
        a = t;
    }
    return n > 1 ? 0 : k;
}

inline bool is_fundamental_discriminant(long long D) {
    if (D == 1) return true;
    long long m = D % 4;
    if (m < 0) m += 4;
    if (m == 1) return is_squarefree(D);
    if (m == 0) {
        long long k = D / 4;
        long long km = k % 4;
        if (km < 0) km += 4;
        return (km == 2 || km == 3) && is_squarefree(k);
    }
    return false;
}

/// Canonical discriminant of Q(sqrt d) for squarefree d; d = 1 gives 1.
inline long long fundamental_discriminant(long long d) {
    if (d == 0)
        throw admissibility_error(admissibility_error::reason::bad_input,
                                  "fundamental_discriminant: d must be nonzero");
    if (!is_squarefree(d))
        throw admissibility_error(admissibility_error::reason::bad_input,
                                  "fundamental_discriminant: d must be squarefree, got " +
                                      std::to_string(d));
    long long m = d % 4;
    if (m < 0) m += 4;
    return m == 1 ? d : 4 * d;
}

/// The primitive quadratic character attached to a fundamental discriminant.
/// D = 1 is the principal character; D > 0 iff the character is even (the
/// attached quadratic field is real).
struct QuadChar {
    long long D = 1;

    long long conductor() const { return D < 0 ? -D : D; }
    bool is_principal() const { return D == 1; }
    bool is_even() const { return D > 0; }
    int operator()(long long n) const { return kronecker(D, n); }
};

inline QuadChar quad_char(long long D) {
    if (!is_fundamental_discriminant(D))
        throw admissibility_error(admissibility_error::reason::bad_input,
                                  "quad_char: " + std::to_string(D) +
                                      " is not a fundamental discriminant");
    return QuadChar{D};
}

/// Write-once memo for B_{2,chi}, keyed by fundamental discriminant.
/// Concurrent readers are free; concurrent inserts of the same key are
/// idempotent (both compute the same value).
class B2Cache {
public:
    bool lookup(long long D, Rational& out) const {
        std::shared_lock lock(mutex_);
        auto it = table_.find(D);
        if (it == table_.end()) return false;
        out = it->second;
        return true;
    }

    void insert(long long D, const Rational& value) {
        std::unique_lock lock(mutex_);
        table_.emplace(D, value);
    }

    void preload(const std::map<long long, Rational>& values) {
        std::unique_lock lock(mutex_);
        for (const auto& [d, v] : values) table_.emplace(d, v);
        preloaded_ = table_.size();
    }

    std::map<long long, Rational> snapshot() const {
        std::shared_lock lock(mutex_);
        return table_;
    }

    void clear() {
        std::unique_lock lock(mutex_);
        table_.clear();
        preloaded_ = 0;
        computed_ = 0;
    }

    void count_computed() { ++computed_; }
    std::uint64_t computed() const { return computed_; }
    std::size_t preloaded() const { return preloaded_; }

private:
    mutable std::shared_mutex mutex_;
    std::map<long long, Rational> table_;
    std::atomic<std::uint64_t> computed_{0};
    std::size_t preloaded_ = 0;
};

inline B2Cache& b2_cache() {
    static B2Cache cache;
    return cache;
}

/// Generalized Bernoulli number B_{2,chi}; equals 1/6 for the principal
/// character and vanishes for odd chi.
inline Rational b2_chi(const QuadChar& chi) {
    Rational cached;
    if (b2_cache().lookup(chi.D, cached)) return cached;

    long long f = chi.conductor();
    Int sum = 0;
    for (long long a = 1; a <= f; ++a) {
        int c = chi(a);
        if (c == 0) continue;
        Int t = Int(6) * a * a - Int(6) * a * f + Int(f) * f;
        if (c > 0)
            sum += t;
        else
            sum -= t;
    }
    Rational value(sum, Int(6) * f);
    b2_cache().count_computed();
    b2_cache().insert(chi.D, value);
    return value;
}

/// L^S(-1, chi) = (-B_{2,chi}/2) * prod_{p in S} (1 - chi(p) p). Primes
/// dividing the conductor contribute a factor 1 since chi(p) = 0.
inline Rational l_minus1_truncated(const QuadChar& chi, const std::set<long long>& sfin) {
    Rational value = -b2_chi(chi) / 2;
    for (long long p : sfin) {
        int c = chi(p);
        if (c != 0) value *= Rational(1 - c * Int(p));
    }
    return value;
}

}  // namespace tamekit
