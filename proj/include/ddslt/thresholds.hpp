#pragma once

// Quantified acceptance thresholds for the qualitative claims the
// experiment suite checks. Collected here so they can be audited in one
// place; the experiment drivers and the acceptance suite share them.

namespace ddslt::thresholds {

// share of nodes that must know k by walk-length coefficient 1.0 (r = 2.0)
inline constexpr double kKReachedAtC1One = 0.9;

// share of nodes with fulfilled code degree by step ceil(2.5 n ln n)
inline constexpr double kFulfilledAtHalfWalk = 0.95;

// maximum gap between the two decoding curves at the top decoding ratio
inline constexpr double kCurveGapAtHighEta = 0.05;

// expected mass of empty nodes under the first-visit baseline, +/- band
inline constexpr double kBaselineEmptyMass = 0.10;
inline constexpr double kBaselineEmptyBand = 0.05;

// tolerated excess of the ddslt storage pmf over the ideal pmf on the
// heavy-degree bins (8..10 for k = 10)
inline constexpr double kHeavyBinExcess = 0.02;

// late-run slack: the fulfilled fraction may not fall more than this below
// its half-walk value by the end of the walk
inline constexpr double kLateCollapseSlack = 0.02;

}  // namespace ddslt::thresholds
