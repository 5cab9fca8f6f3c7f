#ifndef MMU_CORE_HPP
#define MMU_CORE_HPP

// Shared primitive types for the mobile-medical-unit planning library.
//
// Facilities come in two kinds. Sites are candidate locations where a mobile
// unit can be set up and operate a number of weekly sessions. Practices are
// established providers that are always open. Demand origins reference
// facilities through ordered consideration lists, so a facility is identified
// by (kind, index into the instance's site or practice array).

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace mmu {

enum class FacilityKind : uint8_t { site, practice };

struct Facility {
  FacilityKind kind = FacilityKind::site;
  int index = -1;

  friend bool operator==(const Facility& a, const Facility& b) {
    return a.kind == b.kind && a.index == b.index;
  }
  friend bool operator!=(const Facility& a, const Facility& b) { return !(a == b); }
  friend bool operator<(const Facility& a, const Facility& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.index < b.index;
  }
};

inline Facility site_ref(int index) { return Facility{FacilityKind::site, index}; }
inline Facility practice_ref(int index) { return Facility{FacilityKind::practice, index}; }

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Thrown on contract violations: malformed input, unresolved references,
// preconditions such as negative residual capacity.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mmu

#endif  // MMU_CORE_HPP
