#include "qred/weights.hpp"

#include <algorithm>

namespace qred {

StateId WeightKey::state() const {
    const StateId* s = std::get_if<StateId>(&v_);
    if (!s)
        throw TypeError("weight key is not a state");
    return *s;
}

const NestedWeightPtr& WeightKey::nested_ptr() const {
    const NestedWeightPtr* p = std::get_if<NestedWeightPtr>(&v_);
    if (!p)
        throw TypeError("weight key is not a nested weight");
    return *p;
}

const NestedWeight& WeightKey::nested() const { return *nested_ptr(); }

const FingerprintPtr& WeightKey::approximant_ptr() const {
    const FingerprintPtr* p = std::get_if<FingerprintPtr>(&v_);
    if (!p)
        throw TypeError("weight key is not an approximant");
    return *p;
}

const Fingerprint& WeightKey::approximant() const { return *approximant_ptr(); }

std::string WeightKey::canon() const {
    switch (kind()) {
    case Kind::State: {
        char buf[16];
        std::snprintf(buf, sizeof buf, "s%08u", state());
        return buf;
    }
    case Kind::Nested:
        return nested().canon();
    case Kind::Approximant:
        return fingerprint_canon(approximant());
    }
    throw Error("unreachable key kind");
}

bool operator==(const WeightKey& a, const WeightKey& b) {
    return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const WeightKey& a, const WeightKey& b) {
    if (a.kind() != b.kind())
        return static_cast<int>(a.kind()) <=> static_cast<int>(b.kind());
    switch (a.kind()) {
    case WeightKey::Kind::State:
        return a.state() <=> b.state();
    case WeightKey::Kind::Nested:
        return a.nested().canon().compare(b.nested().canon()) <=> 0;
    case WeightKey::Kind::Approximant:
        return fingerprint_canon(a.approximant()).compare(fingerprint_canon(b.approximant())) <=> 0;
    }
    throw Error("unreachable key kind");
}

WeightFunction::WeightFunction(MonoidPtr m) : monoid_(std::move(m)), canon_("{}") {
    if (!monoid_)
        throw TypeError("weight function without a monoid");
}

WeightValue WeightFunction::at(const WeightKey& k) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), k,
                               [](const Entry& e, const WeightKey& key) { return e.first < key; });
    if (it != entries_.end() && it->first == k)
        return it->second;
    return monoid_->zero();
}

WeightValue WeightFunction::total_mass() const {
    WeightValue acc = monoid_->zero();
    for (const auto& [k, v] : entries_)
        acc = monoid_->add(acc, v);
    return acc;
}

bool operator==(const WeightFunction& a, const WeightFunction& b) {
    return same_monoid(a.monoid_, b.monoid_) && a.canon_ == b.canon_;
}

WeightFunction wf_make(MonoidPtr m, std::vector<WeightFunction::Entry> pairs) {
    WeightFunction wf(std::move(m));
    for (const auto& [k, v] : pairs)
        if (!wf.monoid_->contains(v))
            throw TypeError("weight value " + wf.monoid_->show(v) + " outside carrier of " +
                            wf.monoid_->name());

    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<WeightFunction::Entry> merged;
    merged.reserve(pairs.size());
    for (auto& e : pairs) {
        if (!merged.empty() && merged.back().first == e.first)
            merged.back().second = wf.monoid_->add(merged.back().second, e.second);
        else
            merged.push_back(std::move(e));
    }
    std::erase_if(merged, [&](const auto& e) { return wf.monoid_->is_zero(e.second); });

    std::string canon = "{";
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (i)
            canon += ",";
        canon += merged[i].first.canon();
        canon += ":";
        canon += wf.monoid_->show(merged[i].second);
    }
    canon += "}";

    wf.entries_ = std::move(merged);
    wf.canon_ = std::move(canon);
    return wf;
}

WeightFunction wf_pushforward(const std::function<WeightKey(const WeightKey&)>& f,
                              const WeightFunction& phi) {
    std::vector<WeightFunction::Entry> pairs;
    pairs.reserve(phi.size());
    for (const auto& [k, v] : phi.entries())
        pairs.emplace_back(f(k), v);
    return wf_make(phi.monoid(), std::move(pairs));
}

WeightFunction wf_add(const WeightFunction& a, const WeightFunction& b) {
    if (!same_monoid(a.monoid(), b.monoid()))
        throw TypeError("adding weight functions over different monoids");
    std::vector<WeightFunction::Entry> pairs(a.entries());
    pairs.insert(pairs.end(), b.entries().begin(), b.entries().end());
    return wf_make(a.monoid(), std::move(pairs));
}

WeightFunction wf_curry(const MonoidPtr& power, std::span<const WeightFunction> per_label) {
    if (!power || power->kind() != MonoidKind::Power)
        throw TypeError("wf_curry needs a power monoid");
    if (per_label.size() != power->labels().size())
        throw TypeError("wf_curry: one weight function per label required");
    for (const auto& wf : per_label)
        if (!same_monoid(wf.monoid(), power->inner()))
            throw TypeError("wf_curry: component monoid differs from the power's inner monoid");

    std::vector<WeightKey> keys;
    for (const auto& wf : per_label)
        for (const auto& [k, v] : wf.entries())
            keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    std::vector<WeightFunction::Entry> pairs;
    pairs.reserve(keys.size());
    for (const auto& k : keys) {
        WeightValue::Tuple t;
        t.reserve(per_label.size());
        for (const auto& wf : per_label)
            t.push_back(wf.at(k));
        pairs.emplace_back(k, WeightValue(std::move(t)));
    }
    return wf_make(power, std::move(pairs)); // all-zero tuples are dropped there
}

std::vector<WeightFunction> wf_uncurry(const WeightFunction& phi) {
    const MonoidPtr& power = phi.monoid();
    if (power->kind() != MonoidKind::Power)
        throw TypeError("wf_uncurry: input is not weighted in a power monoid");
    const std::size_t n = power->labels().size();

    std::vector<std::vector<WeightFunction::Entry>> per_label(n);
    for (const auto& [k, v] : phi.entries()) {
        const auto& t = v.as_tuple();
        for (std::size_t i = 0; i < n; ++i)
            per_label[i].emplace_back(k, t[i]);
    }
    std::vector<WeightFunction> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(wf_make(power->inner(), std::move(per_label[i])));
    return out;
}

NestedWeight::NestedWeight(std::vector<MonoidPtr> stack, WeightFunction body)
    : stack_(std::move(stack)), body_(std::move(body)) {
    if (stack_.empty())
        throw TypeError("nested weight with an empty monoid stack");
    if (!same_monoid(body_.monoid(), stack_[0]))
        throw TypeError("nested weight body monoid differs from the stack head");
    for (const auto& [k, v] : body_.entries()) {
        if (stack_.size() == 1) {
            if (k.kind() == WeightKey::Kind::Nested)
                throw TypeError("innermost nested-weight level keyed by a nested weight");
        } else {
            const auto& inner = k.nested();
            if (inner.stack().size() + 1 != stack_.size())
                throw TypeError("nested weight key has the wrong stack depth");
            for (std::size_t i = 0; i < inner.stack().size(); ++i)
                if (!same_monoid(inner.stack()[i], stack_[i + 1]))
                    throw TypeError("nested weight key stack mismatch");
        }
    }
}

NestedWeight NestedWeight::zero(std::vector<MonoidPtr> stack) {
    if (stack.empty())
        throw TypeError("nested weight with an empty monoid stack");
    WeightFunction body = wf_make(stack[0], {});
    return NestedWeight(std::move(stack), std::move(body));
}

bool operator==(const NestedWeight& a, const NestedWeight& b) {
    if (a.stack_.size() != b.stack_.size())
        return false;
    for (std::size_t i = 0; i < a.stack_.size(); ++i)
        if (!same_monoid(a.stack_[i], b.stack_[i]))
            return false;
    return a.body_ == b.body_;
}

NestedWeight nested_pushforward(const std::function<WeightKey(StateId)>& f,
                                const NestedWeight& nw) {
    if (nw.stack().size() == 1) {
        auto lifted = [&](const WeightKey& k) { return f(k.state()); };
        return NestedWeight(nw.stack(), wf_pushforward(lifted, nw.body()));
    }
    std::vector<WeightFunction::Entry> pairs;
    pairs.reserve(nw.body().size());
    for (const auto& [k, v] : nw.body().entries()) {
        auto moved = std::make_shared<const NestedWeight>(nested_pushforward(f, k.nested()));
        pairs.emplace_back(WeightKey(std::move(moved)), v);
    }
    return NestedWeight(nw.stack(), wf_make(nw.stack()[0], std::move(pairs)));
}

NestedWeight nested_add(const NestedWeight& a, const NestedWeight& b) {
    if (a.stack().size() != b.stack().size())
        throw TypeError("adding nested weights of different stack depths");
    return NestedWeight(a.stack(), wf_add(a.body(), b.body()));
}

nlohmann::json nested_to_json(const NestedWeight& nw, std::span<const std::string> state_names) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [k, v] : nw.body().entries()) {
        nlohmann::json key;
        switch (k.kind()) {
        case WeightKey::Kind::State:
            key = state_names[k.state()];
            break;
        case WeightKey::Kind::Nested:
            key = nested_to_json(k.nested(), state_names);
            break;
        case WeightKey::Kind::Approximant:
            key = fingerprint_to_json(k.approximant());
            break;
        }
        arr.push_back(nlohmann::json::array({std::move(key), nw.stack()[0]->value_to_json(v)}));
    }
    return arr;
}

NestedWeight nested_from_json(const nlohmann::json& j, std::span<const MonoidPtr> stack,
                              const std::unordered_map<std::string, StateId>& state_ids) {
    if (stack.empty())
        throw TypeError("nested weight with an empty monoid stack");
    if (!j.is_array())
        throw ParseError("weight must be an array of [key, value] pairs");

    std::vector<WeightFunction::Entry> pairs;
    for (const auto& entry : j) {
        if (!entry.is_array() || entry.size() != 2)
            throw ParseError("weight entry must be a [key, value] pair");
        const WeightValue v = stack[0]->value_from_json(entry[1]);
        if (stack.size() == 1) {
            if (!entry[0].is_string())
                throw ParseError("innermost weight key must be a state name");
            const std::string name = entry[0].get<std::string>();
            auto it = state_ids.find(name);
            if (it == state_ids.end())
                throw ParseError("weight references undeclared state '" + name + "'");
            pairs.emplace_back(WeightKey(it->second), v);
        } else {
            auto inner = std::make_shared<const NestedWeight>(
                nested_from_json(entry[0], stack.subspan(1), state_ids));
            pairs.emplace_back(WeightKey(std::move(inner)), v);
        }
    }
    std::vector<MonoidPtr> owned(stack.begin(), stack.end());
    return NestedWeight(std::move(owned), wf_make(stack[0], std::move(pairs)));
}

} // namespace qred
