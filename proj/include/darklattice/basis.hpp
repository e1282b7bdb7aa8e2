#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "darklattice/combinatorics.hpp"

namespace darklattice {

enum class Atom { ground, excited };
enum class Sector { upper, lower };

/// A basis state of the N-mode JC model: the atom level plus one photon
/// occupation per field mode.
struct FockState {
    Atom atom = Atom::ground;
    std::vector<int> occupations;

    int excitation() const {
        int n = (atom == Atom::excited) ? 1 : 0;
        for (int o : occupations) n += o;
        return n;
    }

    /// Canonical rendering, e.g. "g:2,0,0" / "e:1,0".
    std::string str() const {
        std::string s(1, atom == Atom::excited ? 'e' : 'g');
        s += ':';
        for (std::size_t j = 0; j < occupations.size(); ++j) {
            if (j) s += ',';
            s += std::to_string(occupations[j]);
        }
        return s;
    }

    bool operator==(const FockState&) const = default;
};

/// Fixed-excitation subspace of the N-mode model.
struct SubspaceSpec {
    int modes = 0;       // N >= 1
    int excitation = 0;  // n >= 1

    void validate() const {
        if (modes < 1) throw std::invalid_argument("SubspaceSpec: mode count must be >= 1");
        if (excitation < 1) throw std::invalid_argument("SubspaceSpec: excitation must be >= 1");
    }

    bool operator==(const SubspaceSpec&) const = default;
};

/// Number of upper states |e, n1', ..., nN'> with sum n-1: C(N+n-2, N-1).
inline std::uint64_t upper_dimension(const SubspaceSpec& spec) {
    spec.validate();
    return binomial(static_cast<std::uint64_t>(spec.modes) + spec.excitation - 2,
                    static_cast<std::uint64_t>(spec.modes) - 1);
}

/// Number of lower states |g, n1, ..., nN> with sum n: C(N+n-1, N-1).
inline std::uint64_t lower_dimension(const SubspaceSpec& spec) {
    spec.validate();
    return binomial(static_cast<std::uint64_t>(spec.modes) + spec.excitation - 1,
                    static_cast<std::uint64_t>(spec.modes) - 1);
}

/// All occupation tuples of `modes` non-negative integers summing to `total`,
/// in canonical order: first mode descending, recursively on the remainder.
/// Equivalent to the nested loops s2 = 0..total, s3 = 0..s2, ... with
/// occupations (total-s2, s2-s3, ..., s_N).
inline std::vector<std::vector<int>> enumerate_occupations(int modes, int total) {
    if (modes < 1) throw std::invalid_argument("enumerate_occupations: modes must be >= 1");
    if (total < 0) throw std::invalid_argument("enumerate_occupations: total must be >= 0");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(modes), 0);
    auto rec = [&](auto&& self, int mode, int rest) -> void {
        if (mode == modes - 1) {
            cur[static_cast<std::size_t>(mode)] = rest;
            out.push_back(cur);
            return;
        }
        for (int first = rest; first >= 0; --first) {
            cur[static_cast<std::size_t>(mode)] = first;
            self(self, mode + 1, rest - first);
        }
    };
    rec(rec, 0, total);
    return out;
}

inline std::vector<FockState> enumerate_states(const SubspaceSpec& spec, Sector sector) {
    spec.validate();
    const Atom atom = (sector == Sector::upper) ? Atom::excited : Atom::ground;
    const int total = (sector == Sector::upper) ? spec.excitation - 1 : spec.excitation;
    std::vector<FockState> out;
    for (auto& occ : enumerate_occupations(spec.modes, total))
        out.push_back(FockState{atom, std::move(occ)});
    return out;
}

struct StateIndex {
    Sector sector;
    std::size_t position;
    bool operator==(const StateIndex&) const = default;
};

/// Ordered upper+lower basis of an n-excitation subspace with bidirectional
/// index maps. Immutable after construction.
class SubspaceBasis {
public:
    static constexpr std::uint64_t default_capacity = 200000;

    explicit SubspaceBasis(SubspaceSpec spec, std::uint64_t capacity = default_capacity)
        : spec_(spec) {
        spec_.validate();
        if (lower_dimension(spec_) > capacity)
            throw std::length_error("SubspaceBasis: lower dimension exceeds capacity guard of " +
                                    std::to_string(capacity));
        upper_ = enumerate_states(spec_, Sector::upper);
        lower_ = enumerate_states(spec_, Sector::lower);
        for (std::size_t i = 0; i < upper_.size(); ++i) upper_index_[upper_[i].occupations] = i;
        for (std::size_t i = 0; i < lower_.size(); ++i) lower_index_[lower_[i].occupations] = i;
    }

    const SubspaceSpec& spec() const { return spec_; }
    const std::vector<FockState>& upper() const { return upper_; }
    const std::vector<FockState>& lower() const { return lower_; }
    std::size_t upper_size() const { return upper_.size(); }
    std::size_t lower_size() const { return lower_.size(); }

    StateIndex index_of(const FockState& state) const {
        if (static_cast<int>(state.occupations.size()) != spec_.modes)
            throw std::domain_error("index_of: state has wrong mode count");
        if (state.atom == Atom::excited) {
            auto it = upper_index_.find(state.occupations);
            if (it == upper_index_.end())
                throw std::domain_error("index_of: state not in subspace: " + state.str());
            return {Sector::upper, it->second};
        }
        auto it = lower_index_.find(state.occupations);
        if (it == lower_index_.end())
            throw std::domain_error("index_of: state not in subspace: " + state.str());
        return {Sector::lower, it->second};
    }

    /// Position of the lower state with the given occupations.
    std::size_t lower_index(const std::vector<int>& occupations) const {
        auto it = lower_index_.find(occupations);
        if (it == lower_index_.end())
            throw std::domain_error("lower_index: occupations not in lower sector");
        return it->second;
    }

    const FockState& state_at(Sector sector, std::size_t position) const {
        const auto& v = (sector == Sector::upper) ? upper_ : lower_;
        if (position >= v.size()) throw std::out_of_range("state_at: position out of range");
        return v[position];
    }

private:
    SubspaceSpec spec_;
    std::vector<FockState> upper_, lower_;
    std::map<std::vector<int>, std::size_t> upper_index_, lower_index_;
};

}  // namespace darklattice
