#include <tamekit/group_ring.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace tamekit;

namespace {

// Direct O(4^m) character transform, independent of the butterfly.
std::vector<Rational> direct_character_values(const GroupRingElem& x) {
    std::vector<Rational> vals(x.size());
    for (std::uint32_t u = 0; u < x.size(); ++u) {
        Rational s = 0;
        for (std::uint32_t v = 0; v < x.size(); ++v)
            s += char_value({x.rank(), u}, {x.rank(), v}) > 0 ? x.coeff(v) : -x.coeff(v);
        vals[u] = s;
    }
    return vals;
}

GroupRingElem random_elem(int rank, std::mt19937& rng) {
    std::uniform_int_distribution<int> nums(-20, 20), dens(1, 20);
    GroupRingElem x(rank);
    for (std::uint32_t v = 0; v < x.size(); ++v) x.set_coeff(v, Rational(nums(rng), dens(rng)));
    return x;
}

}  // namespace

TEST_CASE("character pairing") {
    CHECK(char_value({1, 0}, {1, 0}) == 1);
    CHECK(char_value({1, 0}, {1, 1}) == 1);   // principal character
    CHECK(char_value({1, 1}, {1, 1}) == -1);  // nontrivial on nontrivial element
    CHECK(char_value({2, 0b11}, {2, 0b01}) == -1);  // single overlapping bit
    CHECK(char_value({2, 0b11}, {2, 0b11}) == 1);
    CHECK_THROWS_AS(char_value({1, 0}, {2, 0}), internal_error);
}

TEST_CASE("group element composition is XOR") {
    GroupElement a{3, 0b101}, b{3, 0b110};
    CHECK((a * b).bits == 0b011);
    CHECK((a * a).is_identity());
    CHECK_THROWS_AS((GroupElement{2, 1} * GroupElement{3, 1}), internal_error);
}

TEST_CASE("inverse transform on known values") {
    SECTION("constant values collapse to the identity") {
        auto x = GroupRingElem::from_character_values(1, {Rational(1), Rational(1)});
        CHECK(x.coeff(0u) == 1);
        CHECK(x.coeff(1u) == 0);
    }
    SECTION("two-character example") {
        auto x = GroupRingElem::from_character_values(1, {Rational(1, 3), Rational(-2, 5)});
        CHECK(x.coeff(0u) == Rational(-1, 30));
        CHECK(x.coeff(1u) == Rational(11, 30));
    }
    SECTION("all zero") {
        auto x = GroupRingElem::from_character_values(2, std::vector<Rational>(4));
        CHECK(x.is_zero());
    }
    SECTION("missing character value") {
        CHECK_THROWS_AS(GroupRingElem::from_character_values(2, std::vector<Rational>(3)),
                        admissibility_error);
    }
}

TEST_CASE("integrality report") {
    GroupRingElem a(1);
    a.set_coeff(0u, Rational(-2));
    a.set_coeff(1u, Rational(18));
    auto ra = a.is_integral();
    CHECK(ra.integral);
    CHECK(ra.denominator_lcm == 1);

    GroupRingElem b(1);
    b.set_coeff(0u, Rational(-1, 30));
    b.set_coeff(1u, Rational(11, 30));
    auto rb = b.is_integral();
    CHECK_FALSE(rb.integral);
    CHECK(rb.denominator_lcm == 30);

    CHECK(GroupRingElem(2).is_integral().integral);
    CHECK(GroupRingElem(2).is_integral().denominator_lcm == 1);
}

TEST_CASE("transform round trip and agreement with the direct sum") {
    std::mt19937 rng(20240811);
    for (int iter = 0; iter < 120; ++iter) {
        int rank = iter % 5;
        GroupRingElem x = random_elem(rank, rng);
        auto vals = x.character_values();
        CHECK(vals == direct_character_values(x));
        CHECK(GroupRingElem::from_character_values(rank, vals) == x);
    }
}

TEST_CASE("multiplication by the full group sum projects onto the principal part") {
    std::mt19937 rng(7);
    for (int rank = 0; rank <= 4; ++rank) {
        GroupRingElem x = random_elem(rank, rng);
        GroupRingElem t = GroupRingElem::group_sum(rank);
        std::vector<Rational> proj_vals(x.size());
        proj_vals[0] = x.character_values()[0];
        GroupRingElem proj = GroupRingElem::from_character_values(rank, proj_vals);
        CHECK(t * x == proj * Rational(Int(1) << rank));
    }
}

TEST_CASE("idempotents are orthogonal idempotents") {
    for (int rank = 0; rank <= 3; ++rank) {
        GroupRingElem one = GroupRingElem::scalar(rank, 1);
        GroupRingElem sum(rank);
        for (std::uint32_t u = 0; u < (std::uint32_t(1) << rank); ++u) {
            GroupRingElem e = GroupRingElem::idempotent({rank, u});
            CHECK(e * e == e);
            sum += e;
            for (std::uint32_t w = 0; w < u; ++w) {
                GroupRingElem f = GroupRingElem::idempotent({rank, w});
                CHECK((e * f).is_zero());
            }
        }
        CHECK(sum == one);
    }
}

TEST_CASE("translation agrees with ring multiplication by a basis element") {
    std::mt19937 rng(99);
    GroupRingElem x = random_elem(3, rng);
    for (std::uint32_t g = 0; g < 8; ++g) {
        GroupElement gamma{3, g};
        CHECK(x.translated(gamma) == GroupRingElem::basis(gamma) * x);
    }
}

TEST_CASE("rank mismatches are hard errors") {
    GroupRingElem a(1), b(2);
    CHECK_THROWS_AS(a + b, internal_error);
    CHECK_THROWS_AS(a * b, internal_error);
    CHECK_THROWS_AS(a.translated(GroupElement{2, 1}), internal_error);
}

TEST_CASE("canonical text form") {
    GroupRingElem x(1);
    x.set_coeff(0u, Rational(-1, 30));
    x.set_coeff(1u, Rational(11, 30));
    CHECK(x.to_text() == "-1/30 + 11/30*g1");
    CHECK(GroupRingElem::from_text("-1/30 + 11/30*g1") == x);

    GroupRingElem y(2);
    y.set_coeff(0u, Rational(1));
    y.set_coeff(3u, Rational(-2, 7));
    CHECK(y.to_text() == "1 + 0*g1 + 0*g2 + -2/7*g1g2");
    CHECK(GroupRingElem::from_text(y.to_text()) == y);

    CHECK(GroupRingElem::scalar(0, Rational(-5)).to_text() == "-5");

    std::mt19937 rng(4242);
    for (int iter = 0; iter < 40; ++iter) {
        GroupRingElem z = random_elem(iter % 4, rng);
        CHECK(GroupRingElem::from_text(z.to_text()) == z);
    }
    CHECK_THROWS_AS(GroupRingElem::from_text("1 + 2*g1 + 3*g2"), admissibility_error);
}

TEST_CASE("coefficient strings follow the bit-pattern order") {
    GroupRingElem x(2);
    x.set_coeff(0u, Rational(1, 2));
    x.set_coeff(1u, Rational(3));
    auto strs = x.to_coeff_strings();
    REQUIRE(strs.size() == 4);
    CHECK(strs[0] == "1/2");
    CHECK(strs[1] == "3");
    CHECK(strs[2] == "0");
    CHECK(parse_rational(strs[0]) == Rational(1, 2));
}
