#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace acpstep {

// A ground term: an integer or a symbolic constant. Integers order before symbols.
class Term {
public:
    Term() : value_(std::int64_t{0}) {}

    static Term number(std::int64_t n) { return Term(n); }
    static Term symbol(std::string name) { return Term(std::move(name)); }

    bool is_number() const { return std::holds_alternative<std::int64_t>(value_); }
    std::int64_t number() const { return std::get<std::int64_t>(value_); }
    const std::string& symbol() const { return std::get<std::string>(value_); }

    std::string str() const;

    friend bool operator==(const Term&, const Term&) = default;
    friend std::strong_ordering operator<=>(const Term& a, const Term& b);

private:
    explicit Term(std::int64_t n) : value_(n) {}
    explicit Term(std::string s) : value_(std::move(s)) {}

    std::variant<std::int64_t, std::string> value_;
};

// Interned ground atom. Copies are a single integer; equality is identity of
// the interned entry and ordering is by content (predicate, arity, arguments),
// so sorted containers of atoms are canonical across runs.
class Atom {
public:
    Atom() = default;
    explicit Atom(std::string_view predicate, std::vector<Term> args = {});

    bool valid() const { return id_ != invalid_id; }
    std::uint32_t id() const { return id_; }

    const std::string& predicate() const;
    std::span<const Term> args() const;
    std::size_t arity() const { return args().size(); }

    // Rendering without spaces, e.g. "wall(3,2)".
    const std::string& str() const;

    friend bool operator==(Atom a, Atom b) { return a.id_ == b.id_; }
    friend std::strong_ordering operator<=>(Atom a, Atom b);

private:
    static constexpr std::uint32_t invalid_id = 0xffffffffu;
    std::uint32_t id_ = invalid_id;
};

struct AtomHash {
    std::size_t operator()(Atom a) const noexcept { return std::hash<std::uint32_t>{}(a.id()); }
};

// Finite set of atoms kept as a sorted vector.
class AtomSet {
public:
    using const_iterator = std::vector<Atom>::const_iterator;

    AtomSet() = default;
    AtomSet(std::initializer_list<Atom> atoms);
    explicit AtomSet(std::vector<Atom> atoms);

    static AtomSet from_sorted(std::vector<Atom> atoms);

    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }
    const_iterator begin() const { return atoms_.begin(); }
    const_iterator end() const { return atoms_.end(); }
    Atom operator[](std::size_t i) const { return atoms_[i]; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    bool contains(Atom a) const;
    // Position of the atom in the sorted order, or size() if absent.
    std::size_t position(Atom a) const;
    bool insert(Atom a);
    bool erase(Atom a);

    bool subset_of(const AtomSet& other) const;
    bool intersects(const AtomSet& other) const;

    friend AtomSet operator|(const AtomSet& a, const AtomSet& b);
    friend AtomSet operator&(const AtomSet& a, const AtomSet& b);
    friend AtomSet operator-(const AtomSet& a, const AtomSet& b);

    // "{a, b(1)}"
    std::string str() const;

    friend bool operator==(const AtomSet&, const AtomSet&) = default;
    // Smaller sets first, then lexicographic.
    friend std::strong_ordering operator<=>(const AtomSet& a, const AtomSet& b);

private:
    std::vector<Atom> atoms_;
};

using Interpretation = AtomSet;

// Sorts and removes duplicates from a family of sets.
void canonicalize(std::vector<AtomSet>& family);
std::string family_str(const std::vector<AtomSet>& family);

} // namespace acpstep
