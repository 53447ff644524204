#include "qred/monoid.hpp"

#include <algorithm>
#include <unordered_set>

namespace qred {

namespace {

std::uint64_t checked_add_u64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw LimitError("natural weight overflow");
    return r;
}

std::int64_t checked_add_i64(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw LimitError("integer weight overflow");
    return r;
}

std::uint64_t parse_u64(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("not a natural number: '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ParseError("natural number out of range: '" + s + "'");
    }
}

std::int64_t parse_i64(const std::string& s) {
    std::size_t start = (!s.empty() && s[0] == '-') ? 1 : 0;
    if (s.size() == start || s.find_first_not_of("0123456789", start) != std::string::npos)
        throw ParseError("not an integer: '" + s + "'");
    try {
        return std::stoll(s);
    } catch (const std::exception&) {
        throw ParseError("integer out of range: '" + s + "'");
    }
}

std::string expect_string(const nlohmann::json& j, const char* what) {
    if (!j.is_string())
        throw ParseError(std::string("expected a string for ") + what);
    return j.get<std::string>();
}

} // namespace

Rational Rational::parse(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos)
        return Rational(parse_i64(text));
    return Rational(parse_i64(text.substr(0, slash)), parse_i64(text.substr(slash + 1)));
}

MonoidPtr Monoid::bool_or() {
    auto m = std::shared_ptr<Monoid>(new Monoid());
    m->kind_ = MonoidKind::BoolOr;
    m->name_ = "bool-or";
    return m;
}

MonoidPtr Monoid::nat_plus() {
    auto m = std::shared_ptr<Monoid>(new Monoid());
    m->kind_ = MonoidKind::NatPlus;
    m->name_ = "nat-plus";
    return m;
}

MonoidPtr Monoid::int_plus() {
    auto m = std::shared_ptr<Monoid>(new Monoid());
    m->kind_ = MonoidKind::IntPlus;
    m->name_ = "int-plus";
    return m;
}

MonoidPtr Monoid::rational_plus() {
    auto m = std::shared_ptr<Monoid>(new Monoid());
    m->kind_ = MonoidKind::RationalPlus;
    m->name_ = "rational-plus";
    return m;
}

MonoidPtr Monoid::power(MonoidPtr inner, std::vector<std::string> labels) {
    if (labels.empty())
        throw DegenerateTypeError("power monoid over an empty label set");
    if (!inner)
        throw TypeError("power monoid without an inner monoid");
    if (inner->trivial())
        throw DegenerateTypeError("power monoid over a trivial inner monoid");
    std::unordered_set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size())
        throw ParseError("power monoid with duplicate labels");
    auto m = std::shared_ptr<Monoid>(new Monoid());
    m->kind_ = MonoidKind::Power;
    m->inner_ = std::move(inner);
    m->labels_ = std::move(labels);
    std::string nm = m->inner_->name() + "^{";
    for (std::size_t i = 0; i < m->labels_.size(); ++i)
        nm += (i ? "," : "") + m->labels_[i];
    m->name_ = nm + "}";
    return m;
}

MonoidPtr Monoid::table(std::vector<std::string> elements,
                        const std::vector<std::vector<std::string>>& add,
                        const std::string& zero, const std::string& nonzero) {
    if (elements.empty())
        throw ParseError("table monoid with no elements");
    std::unordered_set<std::string> seen(elements.begin(), elements.end());
    if (seen.size() != elements.size())
        throw ParseError("table monoid with duplicate element names");

    auto m = std::shared_ptr<Monoid>(new Monoid());
    m->kind_ = MonoidKind::Table;
    m->name_ = "table";
    m->elements_ = std::move(elements);

    const std::size_t n = m->elements_.size();
    if (add.size() != n)
        throw ParseError("table monoid addition table has wrong row count");
    m->add_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (add[i].size() != n)
            throw ParseError("table monoid addition table has wrong column count");
        m->add_[i].resize(n);
        for (std::size_t j = 0; j < n; ++j)
            m->add_[i][j] = m->table_index(add[i][j]); // non-closed table rejected here
    }
    m->zero_index_ = m->table_index(zero);
    m->nonzero_index_ = m->table_index(nonzero);
    if (m->zero_index_ == m->nonzero_index_)
        throw DegenerateTypeError("table monoid: nonzero witness equals zero");
    return m;
}

std::uint32_t Monoid::table_index(const std::string& name) const {
    for (std::uint32_t i = 0; i < elements_.size(); ++i)
        if (elements_[i] == name)
            return i;
    throw ParseError("table monoid: unknown element '" + name + "'");
}

WeightValue Monoid::zero() const {
    switch (kind_) {
    case MonoidKind::BoolOr:
        return WeightValue(false);
    case MonoidKind::NatPlus:
        return WeightValue(std::uint64_t{0});
    case MonoidKind::IntPlus:
        return WeightValue(std::int64_t{0});
    case MonoidKind::RationalPlus:
        return WeightValue(Rational(0));
    case MonoidKind::Power: {
        WeightValue::Tuple t(labels_.size(), inner_->zero());
        return WeightValue(std::move(t));
    }
    case MonoidKind::Table:
        return WeightValue(TableElem{zero_index_});
    }
    throw Error("unreachable monoid kind");
}

WeightValue Monoid::add(const WeightValue& a, const WeightValue& b) const {
    switch (kind_) {
    case MonoidKind::BoolOr:
        return WeightValue(a.as_bool() || b.as_bool());
    case MonoidKind::NatPlus:
        return WeightValue(checked_add_u64(a.as_nat(), b.as_nat()));
    case MonoidKind::IntPlus:
        return WeightValue(checked_add_i64(a.as_int(), b.as_int()));
    case MonoidKind::RationalPlus:
        return WeightValue(a.as_rational() + b.as_rational());
    case MonoidKind::Power: {
        const auto& ta = a.as_tuple();
        const auto& tb = b.as_tuple();
        if (ta.size() != labels_.size() || tb.size() != labels_.size())
            throw TypeError("power value arity mismatch");
        WeightValue::Tuple out;
        out.reserve(ta.size());
        for (std::size_t i = 0; i < ta.size(); ++i)
            out.push_back(inner_->add(ta[i], tb[i]));
        return WeightValue(std::move(out));
    }
    case MonoidKind::Table: {
        const auto ia = a.as_table_elem().index;
        const auto ib = b.as_table_elem().index;
        if (ia >= elements_.size() || ib >= elements_.size())
            throw TypeError("table element out of range");
        return WeightValue(TableElem{add_[ia][ib]});
    }
    }
    throw Error("unreachable monoid kind");
}

bool Monoid::is_zero(const WeightValue& v) const {
    switch (kind_) {
    case MonoidKind::BoolOr:
        return !v.as_bool();
    case MonoidKind::NatPlus:
        return v.as_nat() == 0;
    case MonoidKind::IntPlus:
        return v.as_int() == 0;
    case MonoidKind::RationalPlus:
        return v.as_rational().is_zero();
    case MonoidKind::Power: {
        const auto& t = v.as_tuple();
        return std::all_of(t.begin(), t.end(),
                           [&](const WeightValue& w) { return inner_->is_zero(w); });
    }
    case MonoidKind::Table:
        return v.as_table_elem().index == zero_index_;
    }
    throw Error("unreachable monoid kind");
}

WeightValue Monoid::nonzero_witness() const {
    switch (kind_) {
    case MonoidKind::BoolOr:
        return WeightValue(true);
    case MonoidKind::NatPlus:
        return WeightValue(std::uint64_t{1});
    case MonoidKind::IntPlus:
        return WeightValue(std::int64_t{1});
    case MonoidKind::RationalPlus:
        return WeightValue(Rational(1));
    case MonoidKind::Power: {
        // Inner witness at the first label, zero elsewhere.
        WeightValue::Tuple t(labels_.size(), inner_->zero());
        t[0] = inner_->nonzero_witness();
        return WeightValue(std::move(t));
    }
    case MonoidKind::Table:
        return WeightValue(TableElem{nonzero_index_});
    }
    throw Error("unreachable monoid kind");
}

bool Monoid::trivial() const {
    return finite() && carrier_size() <= 1;
}

bool Monoid::finite() const {
    switch (kind_) {
    case MonoidKind::BoolOr:
    case MonoidKind::Table:
        return true;
    case MonoidKind::Power:
        return inner_->finite();
    default:
        return false;
    }
}

std::size_t Monoid::carrier_size() const {
    switch (kind_) {
    case MonoidKind::BoolOr:
        return 2;
    case MonoidKind::Table:
        return elements_.size();
    case MonoidKind::Power: {
        const std::size_t b = inner_->carrier_size();
        std::size_t r = 1;
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (b != 0 && r > SIZE_MAX / b)
                throw LimitError("power monoid carrier too large to count");
            r *= b;
        }
        return r;
    }
    default:
        throw TypeError("carrier of '" + name_ + "' is infinite");
    }
}

std::vector<WeightValue> Monoid::enumerate_carrier() const {
    switch (kind_) {
    case MonoidKind::BoolOr:
        return {WeightValue(false), WeightValue(true)};
    case MonoidKind::Table: {
        std::vector<WeightValue> out;
        for (std::uint32_t i = 0; i < elements_.size(); ++i)
            out.push_back(WeightValue(TableElem{i}));
        return out;
    }
    case MonoidKind::Power: {
        const auto inner_vals = inner_->enumerate_carrier();
        std::vector<WeightValue> out;
        std::vector<std::size_t> odo(labels_.size(), 0);
        while (true) {
            WeightValue::Tuple t;
            t.reserve(labels_.size());
            for (std::size_t i = 0; i < labels_.size(); ++i)
                t.push_back(inner_vals[odo[i]]);
            out.push_back(WeightValue(std::move(t)));
            std::size_t i = 0;
            for (; i < odo.size(); ++i) {
                if (++odo[i] < inner_vals.size())
                    break;
                odo[i] = 0;
            }
            if (i == odo.size())
                break;
        }
        return out;
    }
    default:
        throw TypeError("cannot enumerate infinite carrier of '" + name_ + "'");
    }
}

bool Monoid::contains(const WeightValue& v) const {
    switch (kind_) {
    case MonoidKind::BoolOr:
        return std::holds_alternative<bool>(v.repr());
    case MonoidKind::NatPlus:
        return std::holds_alternative<std::uint64_t>(v.repr());
    case MonoidKind::IntPlus:
        return std::holds_alternative<std::int64_t>(v.repr());
    case MonoidKind::RationalPlus:
        return std::holds_alternative<Rational>(v.repr());
    case MonoidKind::Power: {
        const auto* t = std::get_if<WeightValue::Tuple>(&v.repr());
        if (!t || t->size() != labels_.size())
            return false;
        return std::all_of(t->begin(), t->end(),
                           [&](const WeightValue& w) { return inner_->contains(w); });
    }
    case MonoidKind::Table: {
        const auto* e = std::get_if<TableElem>(&v.repr());
        return e && e->index < elements_.size();
    }
    }
    return false;
}

std::string Monoid::show(const WeightValue& v) const {
    switch (kind_) {
    case MonoidKind::BoolOr:
        return v.as_bool() ? "tt" : "ff";
    case MonoidKind::NatPlus:
        return std::to_string(v.as_nat());
    case MonoidKind::IntPlus:
        return std::to_string(v.as_int());
    case MonoidKind::RationalPlus:
        return v.as_rational().str();
    case MonoidKind::Power: {
        const auto& t = v.as_tuple();
        std::string s = "(";
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i)
                s += ",";
            s += inner_->show(t[i]);
        }
        return s + ")";
    }
    case MonoidKind::Table:
        return elements_.at(v.as_table_elem().index);
    }
    throw Error("unreachable monoid kind");
}

nlohmann::json Monoid::value_to_json(const WeightValue& v) const {
    if (kind_ == MonoidKind::Power) {
        const auto& t = v.as_tuple();
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < labels_.size(); ++i)
            obj[labels_[i]] = inner_->value_to_json(t[i]);
        return obj;
    }
    return show(v);
}

WeightValue Monoid::value_from_json(const nlohmann::json& j) const {
    switch (kind_) {
    case MonoidKind::BoolOr: {
        const std::string s = expect_string(j, "boolean weight");
        if (s == "tt")
            return WeightValue(true);
        if (s == "ff")
            return WeightValue(false);
        throw ParseError("boolean weight must be \"tt\" or \"ff\", got '" + s + "'");
    }
    case MonoidKind::NatPlus:
        return WeightValue(parse_u64(expect_string(j, "natural weight")));
    case MonoidKind::IntPlus:
        return WeightValue(parse_i64(expect_string(j, "integer weight")));
    case MonoidKind::RationalPlus:
        return WeightValue(Rational::parse(expect_string(j, "rational weight")));
    case MonoidKind::Power: {
        if (!j.is_object())
            throw ParseError("power weight must be a label-keyed object");
        WeightValue::Tuple t;
        t.reserve(labels_.size());
        for (const auto& lbl : labels_) {
            auto it = j.find(lbl);
            t.push_back(it == j.end() ? inner_->zero() : inner_->value_from_json(*it));
        }
        for (auto it = j.begin(); it != j.end(); ++it)
            if (std::find(labels_.begin(), labels_.end(), it.key()) == labels_.end())
                throw ParseError("power weight mentions unknown label '" + it.key() + "'");
        return WeightValue(std::move(t));
    }
    case MonoidKind::Table:
        return WeightValue(TableElem{table_index(expect_string(j, "table weight"))});
    }
    throw Error("unreachable monoid kind");
}

nlohmann::json Monoid::to_json() const {
    nlohmann::json j;
    switch (kind_) {
    case MonoidKind::BoolOr:
        j["kind"] = "bool-or";
        break;
    case MonoidKind::NatPlus:
        j["kind"] = "nat-plus";
        break;
    case MonoidKind::IntPlus:
        j["kind"] = "int-plus";
        break;
    case MonoidKind::RationalPlus:
        j["kind"] = "rational-plus";
        break;
    case MonoidKind::Power:
        j["kind"] = "power";
        j["inner"] = inner_->to_json();
        j["labels"] = labels_;
        break;
    case MonoidKind::Table: {
        j["kind"] = "table";
        j["elements"] = elements_;
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : add_) {
            nlohmann::json r = nlohmann::json::array();
            for (auto idx : row)
                r.push_back(elements_[idx]);
            rows.push_back(std::move(r));
        }
        j["add"] = std::move(rows);
        j["zero"] = elements_[zero_index_];
        j["nonzero"] = elements_[nonzero_index_];
        break;
    }
    }
    return j;
}

MonoidPtr Monoid::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ParseError("monoid spec must be an object with a \"kind\"");
    const std::string kind = expect_string(j.at("kind"), "monoid kind");
    if (kind == "bool-or")
        return bool_or();
    if (kind == "nat-plus")
        return nat_plus();
    if (kind == "int-plus")
        return int_plus();
    if (kind == "rational-plus")
        return rational_plus();
    if (kind == "power") {
        if (!j.contains("inner") || !j.contains("labels"))
            throw ParseError("power monoid needs \"inner\" and \"labels\"");
        std::vector<std::string> labels;
        for (const auto& l : j.at("labels"))
            labels.push_back(expect_string(l, "power label"));
        return power(from_json(j.at("inner")), std::move(labels));
    }
    if (kind == "table") {
        for (const char* field : {"elements", "add", "zero", "nonzero"})
            if (!j.contains(field))
                throw ParseError(std::string("table monoid needs \"") + field + "\"");
        std::vector<std::string> elements;
        for (const auto& e : j.at("elements"))
            elements.push_back(expect_string(e, "table element"));
        std::vector<std::vector<std::string>> add;
        for (const auto& row : j.at("add")) {
            std::vector<std::string> r;
            for (const auto& cell : row)
                r.push_back(expect_string(cell, "table cell"));
            add.push_back(std::move(r));
        }
        return table(std::move(elements), add,
                     expect_string(j.at("zero"), "table zero"),
                     expect_string(j.at("nonzero"), "table nonzero"));
    }
    throw ParseError("unknown monoid kind '" + kind + "'");
}

bool operator==(const Monoid& a, const Monoid& b) {
    if (a.kind_ != b.kind_)
        return false;
    switch (a.kind_) {
    case MonoidKind::Power:
        return a.labels_ == b.labels_ && *a.inner_ == *b.inner_;
    case MonoidKind::Table:
        return a.elements_ == b.elements_ && a.add_ == b.add_ &&
               a.zero_index_ == b.zero_index_ && a.nonzero_index_ == b.nonzero_index_;
    default:
        return true;
    }
}

bool operator!=(const Monoid& a, const Monoid& b) { return !(a == b); }

bool same_monoid(const MonoidPtr& a, const MonoidPtr& b) {
    if (a == b)
        return true;
    if (!a || !b)
        return false;
    return *a == *b;
}

bool LawReport::pass() const {
    return std::all_of(items.begin(), items.end(), [](const Item& i) { return i.pass; });
}

nlohmann::json LawReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& i : items) {
        nlohmann::json e;
        e["law"] = i.law;
        e["pass"] = i.pass;
        if (!i.counterexample.empty())
            e["counterexample"] = i.counterexample;
        arr.push_back(std::move(e));
    }
    return nlohmann::json{{"pass", pass()}, {"laws", std::move(arr)}};
}

LawReport monoid_check(const MonoidPtr& m, std::span<const WeightValue> samples) {
    std::vector<WeightValue> pool(samples.begin(), samples.end());
    if (m->finite())
        pool = m->enumerate_carrier(); // exhaustive for finite carriers
    for (const auto& v : pool)
        if (!m->contains(v))
            throw TypeError("law check sample outside the carrier of " + m->name());

    LawReport rep;
    LawReport::Item assoc{"associativity", true, ""};
    for (const auto& x : pool) {
        for (const auto& y : pool) {
            for (const auto& z : pool) {
                if (!(m->add(m->add(x, y), z) == m->add(x, m->add(y, z)))) {
                    assoc.pass = false;
                    assoc.counterexample = "(" + m->show(x) + "+" + m->show(y) + ")+" +
                                           m->show(z) + " != " + m->show(x) + "+(" +
                                           m->show(y) + "+" + m->show(z) + ")";
                    goto assoc_done;
                }
            }
        }
    }
assoc_done:
    rep.items.push_back(std::move(assoc));

    LawReport::Item comm{"commutativity", true, ""};
    for (const auto& x : pool) {
        for (const auto& y : pool) {
            if (!(m->add(x, y) == m->add(y, x))) {
                comm.pass = false;
                comm.counterexample =
                    m->show(x) + "+" + m->show(y) + " != " + m->show(y) + "+" + m->show(x);
                goto comm_done;
            }
        }
    }
comm_done:
    rep.items.push_back(std::move(comm));

    LawReport::Item unit{"unit", true, ""};
    for (const auto& x : pool) {
        if (!(m->add(x, m->zero()) == x) || !(m->add(m->zero(), x) == x)) {
            unit.pass = false;
            unit.counterexample = m->show(x) + "+0 != " + m->show(x);
            break;
        }
    }
    rep.items.push_back(std::move(unit));

    LawReport::Item wit{"nonzero-witness", true, ""};
    if (m->is_zero(m->nonzero_witness())) {
        wit.pass = false;
        wit.counterexample = "witness " + m->show(m->nonzero_witness()) + " is the zero";
    }
    rep.items.push_back(std::move(wit));
    return rep;
}

MonoidPtr power_monoid(const MonoidPtr& inner, const std::vector<std::string>& labels) {
    return Monoid::power(inner, labels);
}

} // namespace qred
