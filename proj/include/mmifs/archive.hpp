#ifndef MMIFS_ARCHIVE_HPP
#define MMIFS_ARCHIVE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmifs/error.hpp"
#include "mmifs/objectives.hpp"
#include "mmifs/rng.hpp"
#include "mmifs/subset.hpp"

namespace mmifs {

struct ArchiveEntry {
    FeatureSubset subset;
    Objectives objectives;
};

enum class AddOutcome {
    dominated_by_archive,
    added,
    added_with_eviction,
    rejected_full,
    already_present,  // identical mask and objectives; a set holds it once
};

inline const char* to_string(AddOutcome o) {
    switch (o) {
        case AddOutcome::dominated_by_archive: return "dominated_by_archive";
        case AddOutcome::added: return "added";
        case AddOutcome::added_with_eviction: return "added_with_eviction";
        case AddOutcome::rejected_full: return "rejected_full";
        case AddOutcome::already_present: return "already_present";
    }
    return "?";
}

struct AddResult {
    AddOutcome outcome = AddOutcome::added;
    int dominated_removed = 0;
};

// Bounded set of mutually non-dominated entries with recursive-bisection
// grid crowding. Grid bounds track the bounding box of the current entries;
// entries are re-binned whenever the box changes.
class Archive {
  public:
    Archive(int capacity, int grid_depth) :
        capacity_(capacity), depth_(grid_depth),
        occupancy_(static_cast<std::size_t>(1) << (2 * grid_depth), 0) {
        if (capacity < 1) { throw error("Archive: capacity must be >= 1"); }
        if (grid_depth < 1 || grid_depth > 10) {
            throw error("Archive: grid depth must be in [1, 10]");
        }
    }

    const std::vector<ArchiveEntry>& entries() const { return entries_; }
    int size() const { return static_cast<int>(entries_.size()); }
    int capacity() const { return capacity_; }
    int grid_depth() const { return depth_; }

    // Cell id in [0, 2^(2*depth)): depth bisections per objective, low
    // half-open intervals first, values clamped into the current box.
    std::uint32_t grid_cell(const Objectives& o) const {
        const std::uint32_t divisions = 1u << depth_;
        const std::uint32_t ix = axis_index(o.error_pct, lo_[0], hi_[0], divisions);
        const std::uint32_t iy =
            axis_index(static_cast<double>(o.n_selected), lo_[1], hi_[1], divisions);
        return (ix << depth_) | iy;
    }

    // Occupancy of the entry's cell. An entry not currently archived counts
    // itself, so candidates under test compare on equal footing.
    int crowding(const ArchiveEntry& e) const {
        const int occ = occupancy_[grid_cell(e.objectives)];
        return contains(e) ? occ : occ + 1;
    }

    int max_cell_occupancy() const {
        int best = 0;
        for (int occ : occupancy_) { best = std::max(best, occ); }
        return best;
    }

    AddResult try_add(const ArchiveEntry& candidate, Rng& rng) {
        for (const ArchiveEntry& e : entries_) {
            if (e.subset == candidate.subset && e.objectives == candidate.objectives) {
                return {AddOutcome::already_present, 0};
            }
            if (dominates(e.objectives, candidate.objectives)) {
                return {AddOutcome::dominated_by_archive, 0};
            }
        }

        int removed = 0;
        for (std::size_t i = entries_.size(); i > 0; --i) {
            if (dominates(candidate.objectives, entries_[i - 1].objectives)) {
                entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i - 1));
                ++removed;
            }
        }
        if (removed > 0) {
            entries_.push_back(candidate);
            rebuild_grid();
            return {AddOutcome::added, removed};
        }

        if (static_cast<int>(entries_.size()) < capacity_) {
            entries_.push_back(candidate);
            rebuild_grid();
            return {AddOutcome::added, 0};
        }

        // full and mutually incomparable: admit only into a less crowded
        // region, evicting from a most crowded cell
        const int max_occ = max_cell_occupancy();
        const int cand_occ = occupancy_[grid_cell(candidate.objectives)];
        if (cand_occ >= max_occ) { return {AddOutcome::rejected_full, 0}; }

        std::uint32_t victim_cell = 0;
        for (std::uint32_t cell = 0; cell < occupancy_.size(); ++cell) {
            if (occupancy_[cell] == max_occ) {
                victim_cell = cell;
                break;
            }
        }
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (grid_cell(entries_[i].objectives) == victim_cell) { members.push_back(i); }
        }
        const std::size_t victim = members[rng.bounded(members.size())];
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(victim));
        entries_.push_back(candidate);
        rebuild_grid();
        return {AddOutcome::added_with_eviction, 0};
    }

    friend void to_json(nlohmann::json& j, const Archive& a) {
        nlohmann::json list = nlohmann::json::array();
        for (const ArchiveEntry& e : a.entries_) {
            list.push_back({{"mask", e.subset.to_bitstring()},
                            {"error_pct", e.objectives.error_pct},
                            {"n_selected", e.objectives.n_selected}});
        }
        j = nlohmann::json{{"capacity", a.capacity_}, {"grid_depth", a.depth_},
                           {"entries", std::move(list)}};
    }

  private:
    static std::uint32_t axis_index(double v, double lo, double hi, std::uint32_t divisions) {
        if (hi <= lo) { return 0; }
        const double t = (v - lo) / (hi - lo);
        const auto idx = static_cast<long long>(std::floor(t * divisions));
        return static_cast<std::uint32_t>(
            std::clamp<long long>(idx, 0, static_cast<long long>(divisions) - 1));
    }

    bool contains(const ArchiveEntry& e) const {
        for (const ArchiveEntry& x : entries_) {
            if (x.subset == e.subset) { return true; }
        }
        return false;
    }

    void rebuild_grid() {
        lo_[0] = lo_[1] = 0.0;
        hi_[0] = hi_[1] = 0.0;
        if (!entries_.empty()) {
            lo_[0] = hi_[0] = entries_.front().objectives.error_pct;
            lo_[1] = hi_[1] = static_cast<double>(entries_.front().objectives.n_selected);
            for (const ArchiveEntry& e : entries_) {
                lo_[0] = std::min(lo_[0], e.objectives.error_pct);
                hi_[0] = std::max(hi_[0], e.objectives.error_pct);
                lo_[1] = std::min(lo_[1], static_cast<double>(e.objectives.n_selected));
                hi_[1] = std::max(hi_[1], static_cast<double>(e.objectives.n_selected));
            }
        }
        std::fill(occupancy_.begin(), occupancy_.end(), 0);
        for (const ArchiveEntry& e : entries_) { ++occupancy_[grid_cell(e.objectives)]; }
    }

    int capacity_;
    int depth_;
    std::vector<ArchiveEntry> entries_;
    double lo_[2] = {0.0, 0.0};
    double hi_[2] = {0.0, 0.0};
    std::vector<int> occupancy_;
};

}  // namespace mmifs

#endif
