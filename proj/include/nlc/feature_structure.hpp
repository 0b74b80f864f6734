#pragma once

// Hierarchical feature structures: label-sorted maps whose values are atoms
// or nested structures. Unification merges compatible information and
// reports the first clash in depth-first label order; subsumption orders
// structures from general to specific.

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace nlc::fs {

class FeatureStructure;

struct FeatValue {
    std::string atom;
    std::shared_ptr<const FeatureStructure> nested;  // null for atoms

    bool is_atom() const { return nested == nullptr; }
    static FeatValue of_atom(std::string a) { return {std::move(a), nullptr}; }
    static FeatValue of_nested(FeatureStructure fsv);
};

class FeatureStructure {
public:
    const std::vector<std::pair<std::string, FeatValue>>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    const FeatValue* find(const std::string& label) const {
        for (const auto& [l, v] : entries_)
            if (l == label) return &v;
        return nullptr;
    }

    void set(const std::string& label, FeatValue value) {
        auto it = entries_.begin();
        while (it != entries_.end() && it->first < label) ++it;
        if (it != entries_.end() && it->first == label)
            it->second = std::move(value);
        else
            entries_.insert(it, {label, std::move(value)});
    }

    void set_atom(const std::string& label, std::string atom) {
        set(label, FeatValue::of_atom(std::move(atom)));
    }
    void set_nested(const std::string& label, FeatureStructure fsv);

    // Empty path designates the whole structure (returned via a static
    // wrapper value so the signature stays uniform).
    const FeatValue* at_path(const std::vector<std::string>& path) const {
        if (path.empty()) {
            whole_ = FeatValue{"", std::make_shared<FeatureStructure>(*this)};
            return &whole_;
        }
        const FeatureStructure* cur = this;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const FeatValue* v = cur->find(path[i]);
            if (v == nullptr || v->is_atom()) return nullptr;
            cur = v->nested.get();
        }
        return cur->find(path.back());
    }

    // Creates intermediate nested structures along the path as needed.
    void set_path(const std::vector<std::string>& path, const FeatValue& value) {
        if (path.empty()) return;
        if (path.size() == 1) {
            set(path[0], value);
            return;
        }
        FeatureStructure inner;
        const FeatValue* existing = find(path[0]);
        if (existing != nullptr && !existing->is_atom()) inner = *existing->nested;
        inner.set_path({path.begin() + 1, path.end()}, value);
        set_nested(path[0], std::move(inner));
    }

    std::string to_string() const {
        std::string out = "[";
        bool first = true;
        for (const auto& [label, value] : entries_) {
            if (!first) out += ", ";
            first = false;
            out += label + ": ";
            out += value.is_atom() ? value.atom : value.nested->to_string();
        }
        return out + "]";
    }

    friend bool operator==(const FeatureStructure& a, const FeatureStructure& b) {
        if (a.entries_.size() != b.entries_.size()) return false;
        for (std::size_t i = 0; i < a.entries_.size(); ++i) {
            const auto& [al, av] = a.entries_[i];
            const auto& [bl, bv] = b.entries_[i];
            if (al != bl || av.is_atom() != bv.is_atom()) return false;
            if (av.is_atom() ? av.atom != bv.atom : !(*av.nested == *bv.nested)) return false;
        }
        return true;
    }
    friend bool operator!=(const FeatureStructure& a, const FeatureStructure& b) {
        return !(a == b);
    }

private:
    std::vector<std::pair<std::string, FeatValue>> entries_;  // sorted by label
    mutable FeatValue whole_;
};

inline FeatValue FeatValue::of_nested(FeatureStructure fsv) {
    return {"", std::make_shared<const FeatureStructure>(std::move(fsv))};
}

inline void FeatureStructure::set_nested(const std::string& label, FeatureStructure fsv) {
    set(label, FeatValue::of_nested(std::move(fsv)));
}

struct UnifyResult {
    bool ok = false;
    FeatureStructure value;
    std::vector<std::string> conflict_path;
    std::string left, right;  // rendered forms of the clashing values
};

namespace detail {

inline std::string render(const FeatValue& v) {
    return v.is_atom() ? v.atom : v.nested->to_string();
}

inline bool unify_into(FeatureStructure& acc, const FeatureStructure& add,
                       std::vector<std::string>& path, UnifyResult& fail) {
    for (const auto& [label, bv] : add.entries()) {
        const FeatValue* av = acc.find(label);
        if (av == nullptr) {
            acc.set(label, bv);
            continue;
        }
        path.push_back(label);
        if (av->is_atom() && bv.is_atom()) {
            if (av->atom != bv.atom) {
                fail.conflict_path = path;
                fail.left = av->atom;
                fail.right = bv.atom;
                return false;
            }
        } else if (!av->is_atom() && !bv.is_atom()) {
            FeatureStructure merged = *av->nested;
            if (!unify_into(merged, *bv.nested, path, fail)) return false;
            acc.set_nested(label, std::move(merged));
        } else {
            fail.conflict_path = path;
            fail.left = render(*av);
            fail.right = render(bv);
            return false;
        }
        path.pop_back();
    }
    return true;
}

}  // namespace detail

inline UnifyResult unify(const FeatureStructure& a, const FeatureStructure& b) {
    UnifyResult r;
    r.value = a;
    std::vector<std::string> path;
    r.ok = detail::unify_into(r.value, b, path, r);
    if (!r.ok) r.value = FeatureStructure{};
    return r;
}

// True when everything `general` asserts also holds in `specific`.
inline bool subsumes(const FeatureStructure& general, const FeatureStructure& specific) {
    for (const auto& [label, gv] : general.entries()) {
        const FeatValue* sv = specific.find(label);
        if (sv == nullptr || gv.is_atom() != sv->is_atom()) return false;
        if (gv.is_atom()) {
            if (gv.atom != sv->atom) return false;
        } else if (!subsumes(*gv.nested, *sv->nested)) {
            return false;
        }
    }
    return true;
}

}  // namespace nlc::fs
