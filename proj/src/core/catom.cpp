#include <acpstep/core/catom.hpp>
#include <acpstep/error.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>

namespace acpstep {

struct CAtom::Data {
    Kind kind = Kind::Elementary;
    bool complemented = false;
    AtomSet domain;
    std::vector<std::uint64_t> masks;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    std::vector<WeightEntry> entries;
    std::vector<std::uint32_t> entry_position;
    std::optional<std::int64_t> lower_count;
    std::optional<std::int64_t> upper_count;
    std::string text;
    std::size_t hash = 0;
};

namespace {

constexpr std::size_t explicit_limit = 64;
constexpr std::size_t complement_limit = 24;
constexpr std::size_t weight_enumeration_limit = 16;
constexpr double weight_dp_limit = 1 << 20;

std::string format_number(double x) {
    if (std::isinf(x)) {
        return x > 0 ? "#sup" : "#inf";
    }
    if (std::floor(x) == x && std::fabs(x) < 1e15) {
        return std::to_string(static_cast<long long>(x));
    }
    char buffer[64];
    auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
    return std::string(buffer, result.ptr);
}

void render(CAtom::Data& d) {
    std::string& out = d.text;
    out.clear();
    if (d.complemented) {
        out += '~';
    }
    switch (d.kind) {
    case CAtom::Kind::Elementary:
        out += d.domain[0].str();
        break;
    case CAtom::Kind::Explicit: {
        std::vector<AtomSet> sets;
        for (std::uint64_t m : d.masks) {
            std::vector<Atom> atoms;
            for (std::size_t i = 0; i < d.domain.size(); ++i) {
                if ((m >> i) & 1u) {
                    atoms.push_back(d.domain[i]);
                }
            }
            sets.push_back(AtomSet::from_sorted(std::move(atoms)));
        }
        std::sort(sets.begin(), sets.end());
        out += '<' + d.domain.str() + ", " + family_str(sets) + '>';
        break;
    }
    case CAtom::Kind::Weight:
        if (!std::isinf(d.lower)) {
            out += format_number(d.lower) + ' ';
        }
        out += '[';
        for (std::size_t i = 0; i < d.entries.size(); ++i) {
            if (i > 0) {
                out += ", ";
            }
            if (d.entries[i].negated) {
                out += "not ";
            }
            out += d.entries[i].atom.str() + '=' + format_number(d.entries[i].weight);
        }
        out += ']';
        if (!std::isinf(d.upper)) {
            out += ' ' + format_number(d.upper);
        }
        break;
    case CAtom::Kind::Choice:
        if (d.lower_count) {
            out += std::to_string(*d.lower_count) + ' ';
        }
        out += d.domain.str();
        if (d.upper_count) {
            out += ' ' + std::to_string(*d.upper_count);
        }
        break;
    }
    d.hash = std::hash<std::string>{}(d.text);
}

std::shared_ptr<CAtom::Data> finish(std::shared_ptr<CAtom::Data> d) {
    render(*d);
    return d;
}

bool in_count_range(const CAtom::Data& d, std::int64_t c) {
    bool in = (!d.lower_count || c >= *d.lower_count) && (!d.upper_count || c <= *d.upper_count);
    return d.complemented ? !in : in;
}

Truth evaluate_weight(const CAtom::Data& d, std::span<const Truth> v, bool* exact) {
    const std::size_t n = d.domain.size();
    double base = 0;
    std::vector<double> if_true(n, 0.0);
    std::vector<double> if_false(n, 0.0);
    for (std::size_t k = 0; k < d.entries.size(); ++k) {
        const WeightEntry& e = d.entries[k];
        std::uint32_t p = d.entry_position[k];
        if (v[p] == Truth::Unknown) {
            (e.negated ? if_false[p] : if_true[p]) += e.weight;
        } else if ((v[p] == Truth::True) != e.negated) {
            base += e.weight;
        }
    }
    double lo = base;
    double hi = base;
    std::vector<double> spread;
    bool integral = true;
    for (std::size_t p = 0; p < n; ++p) {
        if (v[p] != Truth::Unknown) {
            continue;
        }
        double a = std::min(if_true[p], if_false[p]);
        double b = std::max(if_true[p], if_false[p]);
        lo += a;
        hi += b;
        if (b > a) {
            spread.push_back(b - a);
            integral = integral && std::floor(b - a) == b - a;
        }
    }
    const bool all_in = d.lower <= lo && hi <= d.upper;
    bool none_in = hi < d.lower || lo > d.upper;
    bool decided = true;
    if (!all_in && !none_in) {
        // Is some reachable sum inside [lower, upper]?
        bool any_in = false;
        if (spread.size() <= weight_enumeration_limit) {
            const std::size_t count = std::size_t{1} << spread.size();
            for (std::size_t m = 0; m < count && !any_in; ++m) {
                double s = lo;
                for (std::size_t i = 0; i < spread.size(); ++i) {
                    if ((m >> i) & 1u) {
                        s += spread[i];
                    }
                }
                any_in = d.lower <= s && s <= d.upper;
            }
        } else if (integral && hi - lo <= weight_dp_limit) {
            std::size_t range = static_cast<std::size_t>(hi - lo);
            std::vector<char> reach(range + 1, 0);
            reach[0] = 1;
            for (double s : spread) {
                std::size_t step = static_cast<std::size_t>(s);
                for (std::size_t r = range + 1; r-- > step;) {
                    reach[r] = reach[r] || reach[r - step];
                }
            }
            for (std::size_t r = 0; r <= range && !any_in; ++r) {
                double s = lo + static_cast<double>(r);
                any_in = reach[r] && d.lower <= s && s <= d.upper;
            }
        } else {
            any_in = true;
            decided = false;
        }
        none_in = !any_in;
    }
    if (exact != nullptr && !decided) {
        *exact = false;
    }
    if (!d.complemented) {
        return all_in ? Truth::True : (none_in ? Truth::False : Truth::Unknown);
    }
    return none_in ? Truth::True : (all_in ? Truth::False : Truth::Unknown);
}

std::uint64_t full_mask(std::size_t n) {
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

} // namespace

std::vector<Truth>& CAtom::scratch_buffer() {
    thread_local std::vector<Truth> buffer;
    return buffer;
}

CAtom CAtom::elementary(Atom a) {
    auto d = std::make_shared<Data>();
    d->kind = Kind::Elementary;
    d->domain = AtomSet{a};
    return CAtom(finish(std::move(d)));
}

CAtom CAtom::explicit_satisfiers(AtomSet domain, std::vector<AtomSet> satisfiers) {
    if (domain.size() > explicit_limit) {
        throw Error(ErrorCode::CapExceeded, "explicit c-atom domain larger than 64 atoms");
    }
    auto d = std::make_shared<Data>();
    d->kind = Kind::Explicit;
    d->domain = std::move(domain);
    for (const AtomSet& s : satisfiers) {
        std::uint64_t m = 0;
        for (Atom a : s) {
            std::size_t p = d->domain.position(a);
            if (p == d->domain.size()) {
                throw Error(ErrorCode::PreconditionViolated,
                            "satisfier " + s.str() + " is not a subset of the domain " + d->domain.str());
            }
            m |= std::uint64_t{1} << p;
        }
        d->masks.push_back(m);
    }
    std::sort(d->masks.begin(), d->masks.end());
    d->masks.erase(std::unique(d->masks.begin(), d->masks.end()), d->masks.end());
    return CAtom(finish(std::move(d)));
}

CAtom CAtom::weight(double lower, double upper, std::vector<WeightEntry> entries) {
    auto d = std::make_shared<Data>();
    d->kind = Kind::Weight;
    d->lower = lower;
    d->upper = upper;
    std::sort(entries.begin(), entries.end(), [](const WeightEntry& a, const WeightEntry& b) {
        if (a.atom != b.atom) {
            return a.atom < b.atom;
        }
        if (a.negated != b.negated) {
            return !a.negated;
        }
        return a.weight < b.weight;
    });
    std::vector<Atom> atoms;
    for (const WeightEntry& e : entries) {
        atoms.push_back(e.atom);
    }
    d->domain = AtomSet(std::move(atoms));
    for (const WeightEntry& e : entries) {
        d->entry_position.push_back(static_cast<std::uint32_t>(d->domain.position(e.atom)));
    }
    d->entries = std::move(entries);
    return CAtom(finish(std::move(d)));
}

CAtom CAtom::choice(AtomSet elements, std::optional<std::int64_t> lower, std::optional<std::int64_t> upper) {
    auto d = std::make_shared<Data>();
    d->kind = Kind::Choice;
    d->domain = std::move(elements);
    d->lower_count = lower;
    d->upper_count = upper;
    return CAtom(finish(std::move(d)));
}

CAtom::Kind CAtom::kind() const { return d_->kind; }
bool CAtom::complemented() const { return d_->complemented; }
Atom CAtom::elementary_atom() const { return d_->domain[0]; }
const AtomSet& CAtom::domain() const { return d_->domain; }
double CAtom::lower_weight() const { return d_->lower; }
double CAtom::upper_weight() const { return d_->upper; }
std::span<const WeightEntry> CAtom::entries() const { return d_->entries; }
std::optional<std::int64_t> CAtom::lower_count() const { return d_->lower_count; }
std::optional<std::int64_t> CAtom::upper_count() const { return d_->upper_count; }
const std::string& CAtom::str() const { return d_->text; }
std::size_t CAtom::hash() const { return d_->hash; }

bool operator==(const CAtom& a, const CAtom& b) {
    return a.d_ == b.d_ || (a.d_->hash == b.d_->hash && a.d_->text == b.d_->text);
}

std::strong_ordering operator<=>(const CAtom& a, const CAtom& b) {
    return a.d_->text.compare(b.d_->text) <=> 0;
}

Truth CAtom::evaluate(std::span<const Truth> v, bool* exact) const {
    if (exact != nullptr) {
        *exact = true;
    }
    const Data& d = *d_;
    switch (d.kind) {
    case Kind::Elementary:
        return v[0];
    case Kind::Explicit: {
        std::uint64_t t = 0;
        std::uint64_t f = 0;
        for (std::size_t i = 0; i < d.domain.size(); ++i) {
            if (v[i] == Truth::True) {
                t |= std::uint64_t{1} << i;
            } else if (v[i] == Truth::False) {
                f |= std::uint64_t{1} << i;
            }
        }
        const std::uint64_t fixed = t | f;
        const int free = static_cast<int>(d.domain.size()) - std::popcount(fixed);
        std::uint64_t consistent = 0;
        for (std::uint64_t m : d.masks) {
            if ((m & fixed) == t) {
                ++consistent;
            }
        }
        if (consistent == 0) {
            return Truth::False;
        }
        if (free < 64 && consistent == (std::uint64_t{1} << free)) {
            return Truth::True;
        }
        return Truth::Unknown;
    }
    case Kind::Weight:
        return evaluate_weight(d, v, exact);
    case Kind::Choice: {
        std::int64_t t = 0;
        std::int64_t k = 0;
        for (Truth x : v) {
            t += x == Truth::True;
            k += x == Truth::Unknown;
        }
        bool any = false;
        bool all = true;
        for (std::int64_t c = t; c <= t + k; ++c) {
            if (in_count_range(d, c)) {
                any = true;
            } else {
                all = false;
            }
        }
        return all ? Truth::True : (any ? Truth::Unknown : Truth::False);
    }
    }
    return Truth::Unknown;
}

bool CAtom::satisfied_by(const AtomSet& interpretation) const {
    const AtomSet& dom = domain();
    std::vector<Truth> v(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i) {
        v[i] = interpretation.contains(dom[i]) ? Truth::True : Truth::False;
    }
    return evaluate(v) == Truth::True;
}

bool eval_catom(const CAtom& a, const AtomSet& interpretation) {
    return a.satisfied_by(interpretation);
}

std::vector<AtomSet> CAtom::satisfiers(std::size_t cap) const {
    const AtomSet& dom = domain();
    std::vector<std::uint64_t> masks;
    if (kind() == Kind::Explicit) {
        masks = d_->masks;
    } else {
        if (dom.size() > cap) {
            throw Error(ErrorCode::CapExceeded,
                        "enumerating satisfiers of " + str() + " needs 2^" + std::to_string(dom.size()) + " subsets");
        }
        std::vector<Truth> v(dom.size());
        for (std::uint64_t m = 0; m <= full_mask(dom.size()); ++m) {
            for (std::size_t i = 0; i < dom.size(); ++i) {
                v[i] = ((m >> i) & 1u) ? Truth::True : Truth::False;
            }
            if (evaluate(v) == Truth::True) {
                masks.push_back(m);
            }
            if (m == full_mask(dom.size())) {
                break;
            }
        }
    }
    std::vector<AtomSet> out;
    for (std::uint64_t m : masks) {
        std::vector<Atom> atoms;
        for (std::size_t i = 0; i < dom.size(); ++i) {
            if ((m >> i) & 1u) {
                atoms.push_back(dom[i]);
            }
        }
        out.push_back(AtomSet::from_sorted(std::move(atoms)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::uint64_t> explicit_masks(const CAtom& a) {
    if (a.kind() != CAtom::Kind::Explicit) {
        return {};
    }
    std::vector<std::uint64_t> masks;
    for (const AtomSet& s : a.satisfiers(explicit_limit)) {
        std::uint64_t m = 0;
        for (Atom x : s) {
            m |= std::uint64_t{1} << a.domain().position(x);
        }
        masks.push_back(m);
    }
    std::sort(masks.begin(), masks.end());
    return masks;
}

CAtom complement_catom(const CAtom& a) {
    const CAtom::Data& d = *a.d_;
    if (d.kind == CAtom::Kind::Weight || d.kind == CAtom::Kind::Choice) {
        auto c = std::make_shared<CAtom::Data>(d);
        c->complemented = !d.complemented;
        return CAtom(finish(std::move(c)));
    }
    const std::size_t n = d.domain.size();
    if (n > complement_limit) {
        throw Error(ErrorCode::CapExceeded, "complement of " + a.str() + " needs 2^" + std::to_string(n) + " subsets");
    }
    std::vector<std::uint64_t> present = d.kind == CAtom::Kind::Explicit ? d.masks : std::vector<std::uint64_t>{1};
    auto c = std::make_shared<CAtom::Data>();
    c->kind = CAtom::Kind::Explicit;
    c->domain = d.domain;
    for (std::uint64_t m = 0; m <= full_mask(n); ++m) {
        if (!std::binary_search(present.begin(), present.end(), m)) {
            c->masks.push_back(m);
        }
        if (m == full_mask(n)) {
            break;
        }
    }
    return CAtom(finish(std::move(c)));
}

CAtom weight_to_catom(double lower, double upper, std::vector<WeightEntry> entries) {
    return CAtom::weight(lower, upper, std::move(entries));
}

AtomSet pos_occurrences(const CAtom& a) {
    const AtomSet& dom = a.domain();
    if (a.kind() == CAtom::Kind::Elementary) {
        return dom;
    }
    std::vector<Atom> out;
    if (a.kind() == CAtom::Kind::Explicit) {
        std::uint64_t all = 0;
        for (std::uint64_t m : explicit_masks(a)) {
            all |= m;
        }
        for (std::size_t i = 0; i < dom.size(); ++i) {
            if ((all >> i) & 1u) {
                out.push_back(dom[i]);
            }
        }
        return AtomSet::from_sorted(std::move(out));
    }
    std::vector<Truth> v(dom.size(), Truth::Unknown);
    for (std::size_t i = 0; i < dom.size(); ++i) {
        v[i] = Truth::True;
        if (a.evaluate(v) != Truth::False) {
            out.push_back(dom[i]);
        }
        v[i] = Truth::Unknown;
    }
    return AtomSet::from_sorted(std::move(out));
}

namespace {

Monotonicity classify_counts(const CAtom& a) {
    const std::int64_t n = static_cast<std::int64_t>(a.domain().size());
    std::vector<bool> sat;
    std::vector<Truth> v(a.domain().size(), Truth::False);
    for (std::int64_t c = 0; c <= n; ++c) {
        if (c > 0) {
            v[static_cast<std::size_t>(c - 1)] = Truth::True;
        }
        sat.push_back(a.evaluate(v) == Truth::True);
    }
    bool monotone = true;
    for (std::int64_t c = 0; c < n; ++c) {
        if (sat[c] && !sat[c + 1]) {
            monotone = false;
        }
    }
    if (monotone) {
        return Monotonicity::Monotone;
    }
    auto first = std::find(sat.begin(), sat.end(), true);
    auto last = std::find(sat.rbegin(), sat.rend(), true).base();
    return std::find(first, last, false) == last ? Monotonicity::Convex : Monotonicity::Neither;
}

Monotonicity classify_enumerated(const CAtom& a, std::size_t cap) {
    const std::size_t n = a.domain().size();
    if (n > cap) {
        throw Error(ErrorCode::CapExceeded,
                    "classifying " + a.str() + " needs 2^" + std::to_string(n) + " subsets");
    }
    const std::size_t count = std::size_t{1} << n;
    std::vector<char> sat(count, 0);
    for (const AtomSet& s : a.satisfiers(cap)) {
        std::size_t m = 0;
        for (Atom x : s) {
            m |= std::size_t{1} << a.domain().position(x);
        }
        sat[m] = 1;
    }
    bool monotone = true;
    for (std::size_t m = 0; m < count && monotone; ++m) {
        if (!sat[m]) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!sat[m | (std::size_t{1} << i)]) {
                monotone = false;
                break;
            }
        }
    }
    if (monotone) {
        return Monotonicity::Monotone;
    }
    // below[m]: some satisfier is a subset of m; above[m]: some satisfier is a superset.
    std::vector<char> below(sat);
    std::vector<char> above(sat);
    for (std::size_t m = 0; m < count; ++m) {
        for (std::size_t i = 0; i < n && !below[m]; ++i) {
            if ((m >> i) & 1u) {
                below[m] = below[m & ~(std::size_t{1} << i)];
            }
        }
    }
    for (std::size_t m = count; m-- > 0;) {
        for (std::size_t i = 0; i < n && !above[m]; ++i) {
            if (!((m >> i) & 1u)) {
                above[m] = above[m | (std::size_t{1} << i)];
            }
        }
    }
    for (std::size_t m = 0; m < count; ++m) {
        if (!sat[m] && below[m] && above[m]) {
            return Monotonicity::Neither;
        }
    }
    return Monotonicity::Convex;
}

} // namespace

Monotonicity classify_catom(const CAtom& a, std::size_t cap) {
    switch (a.kind()) {
    case CAtom::Kind::Elementary:
        return Monotonicity::Monotone;
    case CAtom::Kind::Choice:
        return classify_counts(a);
    case CAtom::Kind::Weight: {
        if (!a.complemented()) {
            bool all_positive = true;
            bool all_negative = true;
            double total = 0;
            for (const WeightEntry& e : a.entries()) {
                if (e.weight < 0) {
                    all_positive = all_negative = false;
                }
                (e.negated ? all_positive : all_negative) = false;
                total += e.weight;
            }
            const bool empty = a.lower_weight() > a.upper_weight() || a.lower_weight() > total;
            if (all_positive) {
                return a.upper_weight() >= total || empty ? Monotonicity::Monotone : Monotonicity::Convex;
            }
            if (all_negative) {
                return a.lower_weight() <= 0 || empty ? Monotonicity::Monotone : Monotonicity::Convex;
            }
        }
        return classify_enumerated(a, cap);
    }
    case CAtom::Kind::Explicit: {
        if (a.domain().size() <= cap) {
            return classify_enumerated(a, cap);
        }
        std::vector<std::uint64_t> masks = explicit_masks(a);
        for (std::uint64_t m : masks) {
            for (std::size_t i = 0; i < a.domain().size(); ++i) {
                if (!std::binary_search(masks.begin(), masks.end(), m | (std::uint64_t{1} << i))) {
                    throw Error(ErrorCode::CapExceeded, "classifying " + a.str() + " exceeds the enumeration cap");
                }
            }
        }
        return Monotonicity::Monotone;
    }
    }
    return Monotonicity::Neither;
}

} // namespace acpstep
