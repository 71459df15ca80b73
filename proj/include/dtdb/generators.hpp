#pragma once

// Synthetic task families, emitted as task text.
//
//   chain L            token walks cell_0 .. cell_{L-1}; L states
//   counter B          binary counter to all-ones; 2^B states
//   gripper N          two rooms, two grippers, N balls from rooma to roomb
//   numeric-counter B  counter plus an accumulator bumped on every increment
//   paired G           2G three-valued variables, variable j moves in lockstep
//                      with variable j+G; unsolvable, 3^G states

#include <cstdint>
#include <string>
#include <string_view>

namespace dtdb {

struct GeneratorSpec {
  std::string kind;
  std::uint64_t param = 0;
};

/// Parses "kind:param", e.g. "counter:10".
GeneratorSpec parse_generator_spec(std::string_view spec);

std::string generate_task(const GeneratorSpec& spec);

}  // namespace dtdb
