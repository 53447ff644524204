#include "qred/monoid.hpp"

#include <doctest.h>

#include <random>

using namespace qred;

namespace {

std::vector<WeightValue> nat_samples() {
    return {WeightValue(std::uint64_t{0}), WeightValue(std::uint64_t{1}),
            WeightValue(std::uint64_t{2}), WeightValue(std::uint64_t{3})};
}

} // namespace

TEST_CASE("built-in monoids satisfy the laws") {
    const auto bools = Monoid::bool_or();
    CHECK(monoid_check(bools, {}).pass()); // finite: checked exhaustively

    const auto nat = Monoid::nat_plus();
    const auto samples = nat_samples();
    CHECK(monoid_check(nat, samples).pass());

    std::vector<WeightValue> ints;
    for (std::int64_t v : {-3, -1, 0, 2, 5})
        ints.push_back(WeightValue(v));
    CHECK(monoid_check(Monoid::int_plus(), ints).pass());

    std::vector<WeightValue> rats;
    for (auto [n, d] : {std::pair{1, 2}, {0, 1}, {3, 4}, {-2, 3}})
        rats.push_back(WeightValue(Rational(n, d)));
    CHECK(monoid_check(Monoid::rational_plus(), rats).pass());
}

TEST_CASE("law check on random samples") {
    std::mt19937_64 rng(7);
    const auto nat = Monoid::nat_plus();
    for (int round = 0; round < 20; ++round) {
        std::vector<WeightValue> samples;
        for (int i = 0; i < 4; ++i)
            samples.push_back(WeightValue(std::uint64_t{rng() % 100}));
        const auto rep = monoid_check(nat, samples);
        CHECK(rep.pass());
    }
}

TEST_CASE("non-commutative table is reported") {
    // a+b = a but b+a = b; zero stays a unit.
    const auto m = Monoid::table({"0", "a", "b"},
                                 {{"0", "a", "b"}, {"a", "a", "a"}, {"b", "b", "b"}}, "0", "a");
    const auto rep = monoid_check(m, {});
    CHECK_FALSE(rep.pass());
    bool comm_failed = false;
    for (const auto& item : rep.items)
        if (item.law == "commutativity" && !item.pass)
            comm_failed = true;
    CHECK(comm_failed);
}

TEST_CASE("malformed tables are rejected") {
    CHECK_THROWS_AS(Monoid::table({"0", "a"}, {{"0", "a"}, {"a", "c"}}, "0", "a"), ParseError);
    CHECK_THROWS_AS(Monoid::table({"0", "a"}, {{"0", "a"}}, "0", "a"), ParseError);
    // nonzero witness equal to zero makes the spec trivial / unusable
    CHECK_THROWS_AS(Monoid::table({"0"}, {{"0"}}, "0", "0"), DegenerateTypeError);
}

TEST_CASE("power monoid zero and pointwise sum") {
    const auto nat = Monoid::nat_plus();
    const auto p = power_monoid(nat, {"a", "b"});

    const auto zero = p->zero();
    CHECK(p->show(zero) == "(0,0)");
    CHECK(p->is_zero(zero));

    WeightValue v1(WeightValue::Tuple{WeightValue(std::uint64_t{1}), WeightValue(std::uint64_t{2})});
    WeightValue v2(WeightValue::Tuple{WeightValue(std::uint64_t{3}), WeightValue(std::uint64_t{0})});
    CHECK(p->show(p->add(v1, v2)) == "(4,2)");

    // witness sits at the first label
    CHECK(p->show(p->nonzero_witness()) == "(1,0)");
    CHECK_FALSE(p->is_zero(p->nonzero_witness()));
}

TEST_CASE("power over one label matches the inner addition table") {
    const auto p = power_monoid(Monoid::bool_or(), {"a"});
    const auto inner = Monoid::bool_or();
    const auto pc = p->enumerate_carrier();
    const auto ic = inner->enumerate_carrier();
    REQUIRE(pc.size() == ic.size());
    for (std::size_t i = 0; i < pc.size(); ++i)
        for (std::size_t j = 0; j < pc.size(); ++j) {
            const auto sum = p->add(pc[i], pc[j]);
            const auto inner_sum = inner->add(pc[i].as_tuple()[0], pc[j].as_tuple()[0]);
            CHECK(sum.as_tuple()[0] == inner_sum);
        }
}

TEST_CASE("power monoid degenerate inputs") {
    CHECK_THROWS_AS(power_monoid(Monoid::nat_plus(), {}), DegenerateTypeError);
}

TEST_CASE("power inherits the laws") {
    const auto p = power_monoid(Monoid::nat_plus(), {"a", "b", "c"});
    std::mt19937_64 rng(11);
    std::vector<WeightValue> samples;
    for (int i = 0; i < 5; ++i) {
        WeightValue::Tuple t;
        for (int j = 0; j < 3; ++j)
            t.push_back(WeightValue(std::uint64_t{rng() % 10}));
        samples.push_back(WeightValue(std::move(t)));
    }
    CHECK(monoid_check(p, samples).pass());
}

TEST_CASE("every constructed spec has a genuine nonzero witness") {
    for (const auto& m :
         {Monoid::bool_or(), Monoid::nat_plus(), Monoid::int_plus(), Monoid::rational_plus(),
          power_monoid(Monoid::rational_plus(), {"x", "y"}),
          Monoid::table({"0", "1"}, {{"0", "1"}, {"1", "0"}}, "0", "1")})
        CHECK_FALSE(m->is_zero(m->nonzero_witness()));
}

TEST_CASE("value parsing is exact and strict") {
    const auto rat = Monoid::rational_plus();
    CHECK(rat->show(rat->value_from_json("1/2")) == "1/2");
    CHECK(rat->show(rat->value_from_json("4/2")) == "2");
    CHECK(rat->show(rat->value_from_json("-3/6")) == "-1/2");
    CHECK_THROWS_AS(rat->value_from_json("0.5"), ParseError);
    CHECK_THROWS_AS(rat->value_from_json("1/0"), ParseError);

    const auto nat = Monoid::nat_plus();
    CHECK(nat->value_from_json("3").as_nat() == 3);
    CHECK_THROWS_AS(nat->value_from_json("-1"), ParseError);

    const auto b = Monoid::bool_or();
    CHECK(b->value_from_json("tt").as_bool());
    CHECK_THROWS_AS(b->value_from_json("true"), ParseError);
}

TEST_CASE("monoid spec round trips through JSON") {
    const auto specs = {
        Monoid::bool_or(),
        Monoid::nat_plus(),
        power_monoid(Monoid::nat_plus(), {"a", "b"}),
        Monoid::table({"0", "1"}, {{"0", "1"}, {"1", "0"}}, "0", "1"),
    };
    for (const auto& m : specs) {
        const auto back = Monoid::from_json(m->to_json());
        CHECK(*back == *m);
    }
    CHECK_FALSE(*Monoid::bool_or() == *Monoid::nat_plus());
    CHECK_FALSE(*power_monoid(Monoid::nat_plus(), {"a"}) ==
                *power_monoid(Monoid::nat_plus(), {"b"}));
}

TEST_CASE("exact arithmetic overflows loudly") {
    const auto nat = Monoid::nat_plus();
    const WeightValue big(std::uint64_t{UINT64_MAX});
    CHECK_THROWS_AS(nat->add(big, WeightValue(std::uint64_t{1})), LimitError);
}

TEST_CASE("law check rejects foreign samples") {
    const auto nat = Monoid::nat_plus();
    std::vector<WeightValue> bad{WeightValue(true)};
    CHECK_THROWS_AS(monoid_check(nat, bad), TypeError);
}
