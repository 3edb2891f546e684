#include "scb/types.hpp"

namespace scb {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Contextual:
      return "contextual";
    case Provenance::Noncontextual:
      return "noncontextual";
    case Provenance::Agreement:
      return "agreement";
  }
  return "unknown";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "contextual") return Provenance::Contextual;
  if (s == "noncontextual") return Provenance::Noncontextual;
  if (s == "agreement") return Provenance::Agreement;
  throw DataError("unknown provenance value: " + std::string(s));
}

const char* to_string(ExplorationKind k) {
  switch (k) {
    case ExplorationKind::ThompsonSampling:
      return "ts";
    case ExplorationKind::Ucb:
      return "ucb";
    case ExplorationKind::EpsilonGreedy:
      return "eg";
  }
  return "unknown";
}

}  // namespace scb
