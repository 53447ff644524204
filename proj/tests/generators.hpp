#pragma once

// Seeded random systems for the generator suite. Draws go through plain
// modulo so the sequences are stable for a fixed seed regardless of the
// standard library's distribution implementations.

#include "qred/bisim.hpp"

#include <random>

namespace qred::testgen {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }
    std::size_t below(std::size_t bound) { return bound == 0 ? 0 : eng_() % bound; }
    bool chance(std::size_t num, std::size_t den) { return below(den) < num; }

private:
    std::mt19937_64 eng_;
};

inline WeightValue random_value(Rng& rng, const MonoidPtr& m) {
    switch (m->kind()) {
    case MonoidKind::BoolOr:
        return WeightValue(true);
    case MonoidKind::NatPlus:
        return WeightValue(static_cast<std::uint64_t>(1 + rng.below(3)));
    case MonoidKind::IntPlus:
        return WeightValue(static_cast<std::int64_t>(rng.below(2) ? 1 : -1) *
                           static_cast<std::int64_t>(1 + rng.below(2)));
    case MonoidKind::RationalPlus: {
        static const Rational pool[] = {Rational(1), Rational(1, 2), Rational(2), Rational(1, 3),
                                        Rational(3, 2)};
        return WeightValue(pool[rng.below(5)]);
    }
    case MonoidKind::Power: {
        WeightValue::Tuple t;
        for (std::size_t i = 0; i < m->labels().size(); ++i)
            t.push_back(rng.chance(1, 2) ? random_value(rng, m->inner()) : m->inner()->zero());
        return WeightValue(std::move(t));
    }
    case MonoidKind::Table: {
        const auto carrier = m->enumerate_carrier();
        return carrier[rng.below(carrier.size())];
    }
    }
    return m->zero();
}

// A weight function over a few of the states, possibly empty.
inline WeightFunction random_innermost(Rng& rng, const MonoidPtr& m, std::size_t n_states) {
    std::vector<WeightFunction::Entry> pairs;
    const std::size_t support = rng.below(3); // 0..2
    for (std::size_t i = 0; i < support; ++i)
        pairs.emplace_back(WeightKey(static_cast<StateId>(rng.below(n_states))),
                           random_value(rng, m));
    return wf_make(m, std::move(pairs));
}

inline NestedWeight random_nested(Rng& rng, const std::vector<MonoidPtr>& stack,
                                  std::size_t n_states) {
    if (stack.size() == 1)
        return NestedWeight(stack, random_innermost(rng, stack[0], n_states));
    std::vector<MonoidPtr> tail(stack.begin() + 1, stack.end());
    std::vector<WeightFunction::Entry> pairs;
    const std::size_t support = rng.below(3);
    for (std::size_t i = 0; i < support; ++i) {
        auto inner = std::make_shared<const NestedWeight>(random_nested(rng, tail, n_states));
        pairs.emplace_back(WeightKey(std::move(inner)), random_value(rng, stack[0]));
    }
    return NestedWeight(stack, wf_make(stack[0], std::move(pairs)));
}

inline System random_system(Rng& rng, const TypeDescriptor& type, std::size_t max_states) {
    const std::size_t n = 1 + rng.below(max_states);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i)
        names.push_back("q" + std::to_string(i));
    System s(type, std::move(names));
    for (StateId x = 0; x < n; ++x)
        for (std::size_t c = 0; c < type.components.size(); ++c)
            for (std::size_t l = 0; l < type.components[c].labels.size(); ++l)
                s.set_weight(x, c, l, random_nested(rng, type.components[c].stack, n));
    return s;
}

// The generator families used throughout the suite.
inline System random_lts(std::uint64_t seed, std::size_t max_states = 5) {
    Rng rng(seed * 2654435761u + 101);
    return random_system(rng, lts_type({"a", "b"}), max_states);
}

inline System random_wlts_nat(std::uint64_t seed, std::size_t max_states = 5) {
    Rng rng(seed * 2654435761u + 202);
    return random_system(rng, wlts_type({"a", "b"}, Monoid::nat_plus()), max_states);
}

inline System random_wlts_rational(std::uint64_t seed, std::size_t max_states = 5) {
    Rng rng(seed * 2654435761u + 303);
    return random_system(rng, wlts_type({"a", "b"}, Monoid::rational_plus()), max_states);
}

inline System random_ultras(std::uint64_t seed, std::size_t max_states = 5) {
    Rng rng(seed * 2654435761u + 404);
    return random_system(rng, ultras_type({"a", "b"}, Monoid::nat_plus()), max_states);
}

inline System random_futs2(std::uint64_t seed, std::size_t max_states = 5) {
    Rng rng(seed * 2654435761u + 505);
    TypeDescriptor t{{ComponentType{{"a"}, {Monoid::bool_or(), Monoid::nat_plus()}},
                     ComponentType{{"b"}, {Monoid::nat_plus()}}}};
    return random_system(rng, t, max_states);
}

// WLTS over nat with 1..max_labels labels, for the currying suite.
inline System random_wlts_labels(std::uint64_t seed, std::size_t max_labels = 3,
                                 std::size_t max_states = 5) {
    Rng rng(seed * 2654435761u + 606);
    const std::size_t k = 1 + rng.below(max_labels);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i)
        labels.push_back(std::string(1, static_cast<char>('a' + i)));
    return random_system(rng, wlts_type(std::move(labels), Monoid::nat_plus()), max_states);
}

} // namespace qred::testgen
