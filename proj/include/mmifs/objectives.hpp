#ifndef MMIFS_OBJECTIVES_HPP
#define MMIFS_OBJECTIVES_HPP

namespace mmifs {

// The two minimization targets of the search: wrapper classification error
// in percent and the number of selected features.
struct Objectives {
    double error_pct = 0.0;
    int n_selected = 0;

    bool operator==(const Objectives&) const = default;
};

enum class Dominance { first_dominates, second_dominates, incomparable };

// Pareto dominance under minimization on both axes. Equal objective pairs
// are incomparable: domination requires at least one strict improvement.
inline Dominance compare(const Objectives& a, const Objectives& b) {
    const bool a_le = a.error_pct <= b.error_pct && a.n_selected <= b.n_selected;
    const bool b_le = b.error_pct <= a.error_pct && b.n_selected <= a.n_selected;
    if (a_le && !b_le) { return Dominance::first_dominates; }
    if (b_le && !a_le) { return Dominance::second_dominates; }
    return Dominance::incomparable;
}

inline bool dominates(const Objectives& a, const Objectives& b) {
    return compare(a, b) == Dominance::first_dominates;
}

// a covers b: no worse on both axes, equality allowed on both
inline bool weakly_dominates(const Objectives& a, const Objectives& b) {
    return a.error_pct <= b.error_pct && a.n_selected <= b.n_selected;
}

}  // namespace mmifs

#endif
