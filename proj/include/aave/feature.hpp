#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace aave {

enum class FeatureKind {
  Aint,
  HabitualBe,
  NegativeConcord,
  DoubleComparative,
  PerfectiveDone,
  MultipleModals,
  NullCopula,
};

inline constexpr std::size_t kFeatureCount = 7;

inline constexpr std::array<FeatureKind, kFeatureCount> kAllFeatures = {
    FeatureKind::Aint,           FeatureKind::HabitualBe,     FeatureKind::NegativeConcord,
    FeatureKind::DoubleComparative, FeatureKind::PerfectiveDone, FeatureKind::MultipleModals,
    FeatureKind::NullCopula,
};

constexpr std::size_t feature_index(FeatureKind f) { return static_cast<std::size_t>(f); }

/// Machine name used on the command line, in gold files and in JSON ("habitual_be").
std::string_view feature_name(FeatureKind f);

/// Human-readable label used in rendered tables ("Habitual Be").
std::string_view feature_label(FeatureKind f);

/// Accepts the machine name, the label, or the enum spelling ("HabitualBe"),
/// case-insensitively. Throws ArgumentError on anything else.
FeatureKind parse_feature(std::string_view name);

/// Features whose trigger is anchored on a single word, so a subject can be
/// attached to it. Negative concord, multiple modals and double comparatives
/// span several words and are left out of the per-subject analysis.
constexpr bool supports_context(FeatureKind f) {
  return f == FeatureKind::Aint || f == FeatureKind::HabitualBe ||
         f == FeatureKind::PerfectiveDone || f == FeatureKind::NullCopula;
}

}  // namespace aave
