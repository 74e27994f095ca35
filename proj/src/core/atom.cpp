#include <acpstep/core/atom.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace acpstep {

std::string Term::str() const {
    return is_number() ? std::to_string(number()) : symbol();
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.is_number() != b.is_number()) {
        return a.is_number() ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (a.is_number()) {
        return a.number() <=> b.number();
    }
    return a.symbol().compare(b.symbol()) <=> 0;
}

namespace {

struct AtomEntry {
    std::string predicate;
    std::vector<Term> args;
    std::string text;
};

// Append-only table. Readers index published entries without locking; entries
// live in fixed-size chunks that are never reallocated.
class AtomTable {
public:
    static constexpr std::size_t chunk_bits = 12;
    static constexpr std::size_t chunk_size = std::size_t{1} << chunk_bits;
    static constexpr std::size_t max_chunks = std::size_t{1} << 16;

    static AtomTable& instance() {
        static AtomTable table;
        return table;
    }

    std::uint32_t intern(std::string_view predicate, std::vector<Term> args) {
        std::string text(predicate);
        if (!args.empty()) {
            text += '(';
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (i > 0) {
                    text += ',';
                }
                text += args[i].str();
            }
            text += ')';
        }
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = ids_.find(text);
        if (it != ids_.end()) {
            return it->second;
        }
        std::uint32_t id = size_.load(std::memory_order_relaxed);
        std::size_t chunk = id >> chunk_bits;
        if (chunk >= max_chunks) {
            throw std::length_error("atom table exhausted");
        }
        if (chunks_[chunk].load(std::memory_order_relaxed) == nullptr) {
            owned_.push_back(std::make_unique<AtomEntry[]>(chunk_size));
            chunks_[chunk].store(owned_.back().get(), std::memory_order_release);
        }
        AtomEntry& entry = chunks_[chunk].load(std::memory_order_relaxed)[id & (chunk_size - 1)];
        entry.predicate = std::string(predicate);
        entry.args = std::move(args);
        entry.text = text;
        ids_.emplace(std::move(text), id);
        size_.store(id + 1, std::memory_order_release);
        return id;
    }

    const AtomEntry& get(std::uint32_t id) const {
        return chunks_[id >> chunk_bits].load(std::memory_order_acquire)[id & (chunk_size - 1)];
    }

private:
    std::mutex mutex_;
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::vector<std::unique_ptr<AtomEntry[]>> owned_;
    std::array<std::atomic<AtomEntry*>, max_chunks> chunks_{};
    std::atomic<std::uint32_t> size_{0};
};

} // namespace

Atom::Atom(std::string_view predicate, std::vector<Term> args)
    : id_(AtomTable::instance().intern(predicate, std::move(args))) {}

const std::string& Atom::predicate() const {
    return AtomTable::instance().get(id_).predicate;
}

std::span<const Term> Atom::args() const {
    return AtomTable::instance().get(id_).args;
}

const std::string& Atom::str() const {
    return AtomTable::instance().get(id_).text;
}

std::strong_ordering operator<=>(Atom a, Atom b) {
    if (a.id_ == b.id_) {
        return std::strong_ordering::equal;
    }
    if (!a.valid() || !b.valid()) {
        return a.id_ <=> b.id_;
    }
    const AtomEntry& x = AtomTable::instance().get(a.id_);
    const AtomEntry& y = AtomTable::instance().get(b.id_);
    if (auto c = x.predicate.compare(y.predicate) <=> 0; c != 0) {
        return c;
    }
    if (auto c = x.args.size() <=> y.args.size(); c != 0) {
        return c;
    }
    return std::lexicographical_compare_three_way(x.args.begin(), x.args.end(), y.args.begin(), y.args.end());
}

AtomSet::AtomSet(std::initializer_list<Atom> atoms) : AtomSet(std::vector<Atom>(atoms)) {}

AtomSet::AtomSet(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end());
    atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

AtomSet AtomSet::from_sorted(std::vector<Atom> atoms) {
    AtomSet s;
    s.atoms_ = std::move(atoms);
    return s;
}

bool AtomSet::contains(Atom a) const {
    return std::binary_search(atoms_.begin(), atoms_.end(), a);
}

std::size_t AtomSet::position(Atom a) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
    if (it == atoms_.end() || *it != a) {
        return atoms_.size();
    }
    return static_cast<std::size_t>(it - atoms_.begin());
}

bool AtomSet::insert(Atom a) {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
    if (it != atoms_.end() && *it == a) {
        return false;
    }
    atoms_.insert(it, a);
    return true;
}

bool AtomSet::erase(Atom a) {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
    if (it == atoms_.end() || *it != a) {
        return false;
    }
    atoms_.erase(it);
    return true;
}

bool AtomSet::subset_of(const AtomSet& other) const {
    return std::includes(other.atoms_.begin(), other.atoms_.end(), atoms_.begin(), atoms_.end());
}

bool AtomSet::intersects(const AtomSet& other) const {
    auto i = atoms_.begin();
    auto j = other.atoms_.begin();
    while (i != atoms_.end() && j != other.atoms_.end()) {
        if (*i == *j) {
            return true;
        }
        if (*i < *j) {
            ++i;
        } else {
            ++j;
        }
    }
    return false;
}

AtomSet operator|(const AtomSet& a, const AtomSet& b) {
    std::vector<Atom> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return AtomSet::from_sorted(std::move(out));
}

AtomSet operator&(const AtomSet& a, const AtomSet& b) {
    std::vector<Atom> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return AtomSet::from_sorted(std::move(out));
}

AtomSet operator-(const AtomSet& a, const AtomSet& b) {
    std::vector<Atom> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return AtomSet::from_sorted(std::move(out));
}

std::string AtomSet::str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += atoms_[i].str();
    }
    out += '}';
    return out;
}

std::strong_ordering operator<=>(const AtomSet& a, const AtomSet& b) {
    if (auto c = a.size() <=> b.size(); c != 0) {
        return c;
    }
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

void canonicalize(std::vector<AtomSet>& family) {
    std::sort(family.begin(), family.end());
    family.erase(std::unique(family.begin(), family.end()), family.end());
}

std::string family_str(const std::vector<AtomSet>& family) {
    std::string out = "{";
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += family[i].str();
    }
    out += '}';
    return out;
}

} // namespace acpstep
