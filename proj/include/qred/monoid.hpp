#pragma once

#include "qred/error.hpp"
#include "qred/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qred {

class Monoid;
using MonoidPtr = std::shared_ptr<const Monoid>;

enum class MonoidKind {
    BoolOr,       // ({tt,ff}, ∨, ff)
    NatPlus,      // (ℕ, +, 0)
    IntPlus,      // (ℤ, +, 0)
    RationalPlus, // (ℚ, +, 0), exact fractions
    Power,        // pointwise product M^A over a finite label set A
    Table,        // user-supplied finite carrier with an addition table
};

// Index into a Table monoid's element list. Wrapped so the variant can
// tell it apart from numeric weights.
struct TableElem {
    std::uint32_t index = 0;
    friend bool operator==(const TableElem&, const TableElem&) = default;
};

// One element of a weight monoid's carrier, in exact representation.
// Values are only ever interpreted through the Monoid that produced them.
class WeightValue {
public:
    using Tuple = std::vector<WeightValue>;
    using Repr = std::variant<bool, std::uint64_t, std::int64_t, Rational, Tuple, TableElem>;

    WeightValue() : v_(false) {}
    explicit WeightValue(Repr v) : v_(std::move(v)) {}

    const Repr& repr() const { return v_; }

    bool as_bool() const { return expect<bool>("boolean"); }
    std::uint64_t as_nat() const { return expect<std::uint64_t>("natural"); }
    std::int64_t as_int() const { return expect<std::int64_t>("integer"); }
    const Rational& as_rational() const { return expect<Rational>("rational"); }
    const Tuple& as_tuple() const { return expect<Tuple>("power tuple"); }
    TableElem as_table_elem() const { return expect<TableElem>("table element"); }

    friend bool operator==(const WeightValue& a, const WeightValue& b) { return a.v_ == b.v_; }

private:
    template <typename T>
    const T& expect(const char* what) const {
        const T* p = std::get_if<T>(&v_);
        if (!p)
            throw TypeError(std::string("weight value is not a ") + what);
        return *p;
    }

    Repr v_;
};

// A commutative weight monoid. Immutable after construction and shared by
// handle; all operations are pure, so values are safe to use across threads.
class Monoid : public std::enable_shared_from_this<Monoid> {
public:
    MonoidKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    WeightValue zero() const;
    WeightValue add(const WeightValue& a, const WeightValue& b) const;
    bool is_zero(const WeightValue& v) const;
    // Designated nonzero element; every spec carries one so that gadget
    // constructions never have to search the carrier.
    WeightValue nonzero_witness() const;

    bool trivial() const;
    bool finite() const;
    std::size_t carrier_size() const;               // finite monoids only
    std::vector<WeightValue> enumerate_carrier() const; // finite monoids only

    // True when `v` is a well-formed element of this carrier.
    bool contains(const WeightValue& v) const;

    // Canonical textual form: "tt"/"ff", decimal integers, "n/d" fractions,
    // "(v0,...,vk)" tuples in label order, table element names.
    std::string show(const WeightValue& v) const;

    // External (file format) forms. Booleans and numbers travel as strings,
    // power values as label-keyed objects.
    nlohmann::json value_to_json(const WeightValue& v) const;
    WeightValue value_from_json(const nlohmann::json& j) const;

    nlohmann::json to_json() const;
    static MonoidPtr from_json(const nlohmann::json& j);

    // Power monoid accessors.
    const MonoidPtr& inner() const { return inner_; }
    const std::vector<std::string>& labels() const { return labels_; }

    // Table monoid accessors.
    const std::vector<std::string>& elements() const { return elements_; }

    // Structural equality of specs; handles may differ.
    friend bool operator==(const Monoid& a, const Monoid& b);

    static MonoidPtr bool_or();
    static MonoidPtr nat_plus();
    static MonoidPtr int_plus();
    static MonoidPtr rational_plus();
    static MonoidPtr power(MonoidPtr inner, std::vector<std::string> labels);
    static MonoidPtr table(std::vector<std::string> elements,
                           const std::vector<std::vector<std::string>>& add,
                           const std::string& zero, const std::string& nonzero);

private:
    Monoid() = default;

    std::uint32_t table_index(const std::string& name) const;

    MonoidKind kind_ = MonoidKind::BoolOr;
    std::string name_;

    // power
    MonoidPtr inner_;
    std::vector<std::string> labels_;

    // table
    std::vector<std::string> elements_;
    std::vector<std::vector<std::uint32_t>> add_;
    std::uint32_t zero_index_ = 0;
    std::uint32_t nonzero_index_ = 0;
};

bool operator!=(const Monoid& a, const Monoid& b);
bool same_monoid(const MonoidPtr& a, const MonoidPtr& b);

// Report of the monoid law checks: associativity, commutativity, unit laws
// and non-triviality of the declared witness. Sample-based for infinite
// carriers, exhaustive for finite ones.
struct LawReport {
    struct Item {
        std::string law;
        bool pass = true;
        std::string counterexample; // empty when pass
    };
    std::vector<Item> items;

    bool pass() const;
    nlohmann::json to_json() const;
};

LawReport monoid_check(const MonoidPtr& m, std::span<const WeightValue> samples);

// M^A with pointwise zero and addition; the witness places `inner`'s
// witness at the first label and zero elsewhere.
MonoidPtr power_monoid(const MonoidPtr& inner, const std::vector<std::string>& labels);

} // namespace qred
