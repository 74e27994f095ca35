#include <acpstep/core/rule.hpp>

#include <algorithm>
#include <functional>

namespace acpstep {

bool CLiteral::satisfied_by(const AtomSet& interpretation) const {
    return atom.satisfied_by(interpretation) != negated;
}

std::string CLiteral::str() const {
    return negated ? "not " + atom.str() : atom.str();
}

struct CRule::Data {
    std::vector<CAtom> head;
    std::vector<CAtom> positive;
    std::vector<CAtom> negative;
    AtomSet domain;
    std::string text;
    std::size_t hash = 0;
};

CRule::CRule(std::vector<CAtom> head, std::vector<CAtom> positive_body, std::vector<CAtom> negative_body) {
    auto d = std::make_shared<Data>();
    d->head = std::move(head);
    d->positive = std::move(positive_body);
    d->negative = std::move(negative_body);
    std::vector<Atom> atoms;
    for (const auto* part : {&d->head, &d->positive, &d->negative}) {
        for (const CAtom& a : *part) {
            atoms.insert(atoms.end(), a.domain().begin(), a.domain().end());
        }
    }
    d->domain = AtomSet(std::move(atoms));

    std::string& out = d->text;
    for (std::size_t i = 0; i < d->head.size(); ++i) {
        if (i > 0) {
            out += " | ";
        }
        out += d->head[i].str();
    }
    const bool has_body = !d->positive.empty() || !d->negative.empty();
    if (has_body || d->head.empty()) {
        out += d->head.empty() ? ":-" : " :-";
        bool first = true;
        for (const CAtom& a : d->positive) {
            out += first ? " " : ", ";
            out += a.str();
            first = false;
        }
        for (const CAtom& a : d->negative) {
            out += first ? " not " : ", not ";
            out += a.str();
            first = false;
        }
    }
    out += '.';
    d->hash = std::hash<std::string>{}(out);
    d_ = std::move(d);
}

std::span<const CAtom> CRule::head() const { return d_->head; }
std::span<const CAtom> CRule::positive_body() const { return d_->positive; }
std::span<const CAtom> CRule::negative_body() const { return d_->negative; }
const AtomSet& CRule::domain() const { return d_->domain; }
const std::string& CRule::str() const { return d_->text; }
std::size_t CRule::hash() const { return d_->hash; }

std::vector<CLiteral> CRule::body() const {
    std::vector<CLiteral> out;
    for (const CAtom& a : d_->positive) {
        out.push_back({a, false});
    }
    for (const CAtom& a : d_->negative) {
        out.push_back({a, true});
    }
    return out;
}

bool CRule::body_satisfied(const AtomSet& interpretation) const {
    for (const CAtom& a : d_->positive) {
        if (!a.satisfied_by(interpretation)) {
            return false;
        }
    }
    for (const CAtom& a : d_->negative) {
        if (a.satisfied_by(interpretation)) {
            return false;
        }
    }
    return true;
}

bool CRule::head_satisfied(const AtomSet& interpretation) const {
    return std::any_of(d_->head.begin(), d_->head.end(),
                       [&](const CAtom& a) { return a.satisfied_by(interpretation); });
}

bool operator==(const CRule& a, const CRule& b) {
    return a.d_ == b.d_ || (a.d_->hash == b.d_->hash && a.d_->text == b.d_->text);
}

std::strong_ordering operator<=>(const CRule& a, const CRule& b) {
    return a.d_->text.compare(b.d_->text) <=> 0;
}

GroundProgram::GroundProgram(std::vector<CRule> rules) : rules_(std::move(rules)) {
    std::sort(rules_.begin(), rules_.end());
    rules_.erase(std::unique(rules_.begin(), rules_.end()), rules_.end());
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        atoms.insert(atoms.end(), rules_[i].domain().begin(), rules_[i].domain().end());
        index_.emplace(rules_[i].str(), i);
    }
    domain_ = AtomSet(std::move(atoms));
}

std::optional<std::size_t> GroundProgram::index_of(const CRule& r) const {
    return index_of(r.str());
}

std::optional<std::size_t> GroundProgram::index_of(const std::string& text) const {
    auto it = index_.find(text);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool GroundProgram::subset_of(const GroundProgram& other) const {
    return std::all_of(rules_.begin(), rules_.end(), [&](const CRule& r) { return other.contains(r); });
}

GroundProgram operator|(const GroundProgram& a, const GroundProgram& b) {
    std::vector<CRule> rules(a.rules_);
    rules.insert(rules.end(), b.rules_.begin(), b.rules_.end());
    return GroundProgram(std::move(rules));
}

GroundProgram operator-(const GroundProgram& a, const GroundProgram& b) {
    std::vector<CRule> rules;
    for (const CRule& r : a.rules_) {
        if (!b.contains(r)) {
            rules.push_back(r);
        }
    }
    return GroundProgram(std::move(rules));
}

std::string GroundProgram::str() const {
    std::string out;
    for (const CRule& r : rules_) {
        out += r.str();
        out += '\n';
    }
    return out;
}

bool eval_literal(const CLiteral& l, const AtomSet& interpretation) {
    return l.satisfied_by(interpretation);
}

bool rule_active(const CRule& r, const AtomSet& interpretation) {
    return r.body_satisfied(interpretation);
}

bool rule_satisfied(const CRule& r, const AtomSet& interpretation) {
    return !r.body_satisfied(interpretation) || r.head_satisfied(interpretation);
}

bool program_satisfied(const GroundProgram& p, const AtomSet& interpretation) {
    return std::all_of(p.begin(), p.end(), [&](const CRule& r) { return rule_satisfied(r, interpretation); });
}

} // namespace acpstep
