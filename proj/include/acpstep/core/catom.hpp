#pragma once

#include <acpstep/core/atom.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace acpstep {

enum class Truth : std::uint8_t { False, True, Unknown };

inline Truth negate(Truth t) {
    return t == Truth::Unknown ? t : (t == Truth::True ? Truth::False : Truth::True);
}

enum class Monotonicity { Monotone, Convex, Neither };

struct WeightEntry {
    Atom atom;
    bool negated = false;
    double weight = 1.0;

    friend bool operator==(const WeightEntry&, const WeightEntry&) = default;
};

// Abstract constraint atom <D, C>: a finite domain D and the admissible
// subsets C of D. The satisfier family is stored extensionally for
// Explicit and described by a formula for the other kinds; Weight and Choice
// can additionally be complemented (C replaced by 2^D \ C).
class CAtom {
public:
    enum class Kind { Elementary, Explicit, Weight, Choice };

    static CAtom elementary(Atom a);
    // Satisfiers must be subsets of the domain; |domain| <= 64.
    static CAtom explicit_satisfiers(AtomSet domain, std::vector<AtomSet> satisfiers);
    // Sum over entries whose literal holds must lie in [lower, upper]; infinite bounds allowed.
    static CAtom weight(double lower, double upper, std::vector<WeightEntry> entries);
    // Number of true elements must lie in [lower, upper].
    static CAtom choice(AtomSet elements, std::optional<std::int64_t> lower = std::nullopt,
                       std::optional<std::int64_t> upper = std::nullopt);

    Kind kind() const;
    bool complemented() const;
    bool is_elementary() const { return kind() == Kind::Elementary; }
    Atom elementary_atom() const;

    const AtomSet& domain() const;

    // Explicit: the satisfier family. Other kinds: computed up to the cap.
    std::vector<AtomSet> satisfiers(std::size_t cap) const;
    double lower_weight() const;
    double upper_weight() const;
    std::span<const WeightEntry> entries() const;
    std::optional<std::int64_t> lower_count() const;
    std::optional<std::int64_t> upper_count() const;

    bool satisfied_by(const AtomSet& interpretation) const;

    // Two-valued evaluation; is_true(i) gives the value of domain()[i].
    template <class IsTrue>
    bool accepts(IsTrue&& is_true) const {
        std::vector<Truth>& scratch = scratch_buffer();
        scratch.resize(domain().size());
        for (std::size_t i = 0; i < scratch.size(); ++i) {
            scratch[i] = is_true(i) ? Truth::True : Truth::False;
        }
        return evaluate(scratch) == Truth::True;
    }

    // Three-valued evaluation over domain positions: True if every completion
    // of the Unknown positions is a satisfier, False if none is, else Unknown.
    // Sets *exact to false when the answer Unknown is only an approximation
    // (large weight constraints); True and False answers are always exact.
    Truth evaluate(std::span<const Truth> values, bool* exact = nullptr) const;

    const std::string& str() const;
    std::size_t hash() const;

    friend bool operator==(const CAtom& a, const CAtom& b);
    friend std::strong_ordering operator<=>(const CAtom& a, const CAtom& b);

    struct Data;

private:
    explicit CAtom(std::shared_ptr<const Data> data) : d_(std::move(data)) {}
    static std::vector<Truth>& scratch_buffer();
    friend CAtom complement_catom(const CAtom& a);

    std::shared_ptr<const Data> d_;
};

// Shorthand for the satisfiers-as-masks view of an explicit c-atom.
std::vector<std::uint64_t> explicit_masks(const CAtom& a);

// <D, 2^D \ C>. Weight and Choice stay intensional; Elementary and Explicit
// are expanded (|D| <= 24).
CAtom complement_catom(const CAtom& a);

// Weight constraint as an intensional c-atom (same as CAtom::weight).
CAtom weight_to_catom(double lower, double upper, std::vector<WeightEntry> entries);

// Atoms occurring in at least one satisfier. Exact except for weight
// constraints too large to decide, where the whole domain is returned.
AtomSet pos_occurrences(const CAtom& a);

// Throws CapExceeded when exact classification needs enumeration beyond cap.
Monotonicity classify_catom(const CAtom& a, std::size_t cap);

bool eval_catom(const CAtom& a, const AtomSet& interpretation);

} // namespace acpstep
