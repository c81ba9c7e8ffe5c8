#include "aave/feature.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "aave/error.hpp"

namespace aave {

namespace {

struct FeatureNames {
  FeatureKind kind;
  std::string_view name;
  std::string_view label;
  std::string_view enum_name;
};

constexpr FeatureNames kNames[] = {
    {FeatureKind::Aint, "aint", "Ain't", "Aint"},
    {FeatureKind::HabitualBe, "habitual_be", "Habitual Be", "HabitualBe"},
    {FeatureKind::NegativeConcord, "negative_concord", "Negative Concord", "NegativeConcord"},
    {FeatureKind::DoubleComparative, "double_comparative", "Double Comparative", "DoubleComparative"},
    {FeatureKind::PerfectiveDone, "perfective_done", "Perfective Done", "PerfectiveDone"},
    {FeatureKind::MultipleModals, "multiple_modals", "Multiple Modals", "MultipleModals"},
    {FeatureKind::NullCopula, "null_copula", "Null Copula", "NullCopula"},
};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view feature_name(FeatureKind f) { return kNames[feature_index(f)].name; }

std::string_view feature_label(FeatureKind f) { return kNames[feature_index(f)].label; }

FeatureKind parse_feature(std::string_view name) {
  for (const auto& n : kNames) {
    if (iequals(name, n.name) || iequals(name, n.label) || iequals(name, n.enum_name)) {
      return n.kind;
    }
  }
  throw ArgumentError("unknown feature '" + std::string(name) + "'");
}

}  // namespace aave
