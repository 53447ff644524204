#pragma once

#include "qred/monoid.hpp"

#include <compare>
#include <functional>
#include <memory>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qred {

using StateId = std::uint32_t;

class NestedWeight;
class Fingerprint; // final-sequence approximant, defined with the bisimulation code
using NestedWeightPtr = std::shared_ptr<const NestedWeight>;
using FingerprintPtr = std::shared_ptr<const Fingerprint>;

// Canonical, name-free string form of an approximant; used for key ordering.
const std::string& fingerprint_canon(const Fingerprint& f);
nlohmann::json fingerprint_to_json(const Fingerprint& f);

// Key of a finitely supported weight function: a state at the innermost
// level of a system's structure, a boxed nested weight at outer levels, or
// an approximant while evaluating the final sequence.
//
// The total order follows the canonical form: states by declaration index,
// boxed values lexicographically by their canonical serialization.
class WeightKey {
public:
    enum class Kind { State, Nested, Approximant };

    explicit WeightKey(StateId s) : v_(s) {}
    explicit WeightKey(NestedWeightPtr nw) : v_(std::move(nw)) {}
    explicit WeightKey(FingerprintPtr fp) : v_(std::move(fp)) {}

    Kind kind() const { return static_cast<Kind>(v_.index()); }
    StateId state() const;
    const NestedWeight& nested() const;
    const NestedWeightPtr& nested_ptr() const;
    const Fingerprint& approximant() const;
    const FingerprintPtr& approximant_ptr() const;

    // Ordering token; state keys use a zero-padded index so lexicographic
    // comparison agrees with declaration order.
    std::string canon() const;

    friend bool operator==(const WeightKey& a, const WeightKey& b);
    friend std::strong_ordering operator<=>(const WeightKey& a, const WeightKey& b);

private:
    std::variant<StateId, NestedWeightPtr, FingerprintPtr> v_;
};

// Finitely supported map from keys to nonzero weights. Entries are kept
// sorted in canonical key order with no stored zeros, so structural
// equality coincides with extensional equality and the canonical string
// is a usable hash key.
class WeightFunction {
public:
    using Entry = std::pair<WeightKey, WeightValue>;

    explicit WeightFunction(MonoidPtr m);

    const MonoidPtr& monoid() const { return monoid_; }
    const std::vector<Entry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    // Weight at `k`; the monoid zero when `k` is outside the support.
    WeightValue at(const WeightKey& k) const;
    WeightValue total_mass() const;

    const std::string& canon() const { return canon_; }

    friend bool operator==(const WeightFunction& a, const WeightFunction& b);

private:
    friend WeightFunction wf_make(MonoidPtr, std::vector<Entry>);

    MonoidPtr monoid_;
    std::vector<Entry> entries_;
    std::string canon_;
};

// Normalizes a formal sum: duplicate keys merged by monoid addition,
// zero-valued entries dropped, canonical order imposed. Values outside the
// carrier raise TypeError.
WeightFunction wf_make(MonoidPtr m, std::vector<WeightFunction::Entry> pairs);

// Functorial action: (F_M f)(phi) = \y. sum over the fiber f^-1(y) of phi.
// Total weight is preserved.
WeightFunction wf_pushforward(const std::function<WeightKey(const WeightKey&)>& f,
                              const WeightFunction& phi);

// Pointwise sum of two weight functions over the same monoid.
WeightFunction wf_add(const WeightFunction& a, const WeightFunction& b);

// The natural isomorphism (F_M -)^A = F_{M^A}: fuses an A-indexed family
// of weight functions into one function over the power monoid, dropping
// keys whose tuple is all-zero. `per_label` follows `power`'s label order.
WeightFunction wf_curry(const MonoidPtr& power, std::span<const WeightFunction> per_label);

// Inverse of wf_curry; input must be weighted in a power monoid.
std::vector<WeightFunction> wf_uncurry(const WeightFunction& phi);

// An element of F_{M0}(F_{M1}(... F_{Mm} X)): a weight function over M0
// whose keys are states (m = 0) or canonical NestedWeights of the tail
// stack. Canonical at every level.
class NestedWeight {
public:
    NestedWeight(std::vector<MonoidPtr> stack, WeightFunction body);

    static NestedWeight zero(std::vector<MonoidPtr> stack);

    const std::vector<MonoidPtr>& stack() const { return stack_; }
    const WeightFunction& body() const { return body_; }
    bool is_zero() const { return body_.empty(); }
    const std::string& canon() const { return body_.canon(); }

    friend bool operator==(const NestedWeight& a, const NestedWeight& b);

private:
    std::vector<MonoidPtr> stack_;
    WeightFunction body_;
};

// Applies `f` to the innermost-level states and re-canonicalizes each level
// outward, combining outer weights of keys that become equal.
NestedWeight nested_pushforward(const std::function<WeightKey(StateId)>& f,
                                const NestedWeight& nw);

// Union-with-addition at the outer level (the F_M sum). Stacks must match.
NestedWeight nested_add(const NestedWeight& a, const NestedWeight& b);

// File format: innermost level [["y","3"]], outer levels [[<inner>, "tt"]].
nlohmann::json nested_to_json(const NestedWeight& nw, std::span<const std::string> state_names);
NestedWeight nested_from_json(const nlohmann::json& j, std::span<const MonoidPtr> stack,
                              const std::unordered_map<std::string, StateId>& state_ids);

} // namespace qred
