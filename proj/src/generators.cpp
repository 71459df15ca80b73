#include "dtdb/generators.hpp"

#include <charconv>

#include "dtdb/errors.hpp"

namespace dtdb {

namespace {

std::string chain(std::uint64_t length) {
  std::string out = "gtf 1\n# chain " + std::to_string(length) + "\n";
  for (std::uint64_t i = 0; i < length; ++i) out += "atom cell_" + std::to_string(i) + "\n";
  out += "init cell_0\n";
  out += "goal +cell_" + std::to_string(length - 1) + "\n";
  for (std::uint64_t i = 0; i + 1 < length; ++i) {
    const std::string from = "cell_" + std::to_string(i);
    const std::string to = "cell_" + std::to_string(i + 1);
    out += "action move_" + std::to_string(i) + " 1\npre +" + from + "\nadd " + to + "\ndel " + from + "\nend\n";
  }
  return out;
}

// Increment i is applicable exactly when bit i is the lowest clear bit.
std::string counter(std::uint64_t bits, bool numeric) {
  std::string out = "gtf 1\n# " + std::string(numeric ? "numeric-counter " : "counter ") + std::to_string(bits) + "\n";
  for (std::uint64_t i = 0; i < bits; ++i) out += "atom bit_" + std::to_string(i) + "\n";
  if (numeric) out += "numvar acc 0\n";
  out += "init\ngoal";
  for (std::uint64_t i = 0; i < bits; ++i) out += " +bit_" + std::to_string(i);
  const std::string top = std::to_string((std::uint64_t{1} << bits) - 1);
  if (numeric) out += " ; acc >= " + top;
  out += "\n";
  for (std::uint64_t i = 0; i < bits; ++i) {
    out += "action inc_" + std::to_string(i) + " 1\npre -bit_" + std::to_string(i);
    for (std::uint64_t j = 0; j < i; ++j) out += " +bit_" + std::to_string(j);
    out += "\n";
    if (numeric) out += "npre acc < " + std::to_string(std::uint64_t{1} << bits) + "\n";
    out += "add bit_" + std::to_string(i) + "\n";
    if (i > 0) {
      out += "del";
      for (std::uint64_t j = 0; j < i; ++j) out += " bit_" + std::to_string(j);
      out += "\n";
    }
    if (numeric) out += "neff acc += 1\n";
    out += "end\n";
  }
  return out;
}

std::string gripper(std::uint64_t balls) {
  const char* rooms[] = {"rooma", "roomb"};
  const char* hands[] = {"left", "right"};
  std::string out = "gtf 1\n# gripper " + std::to_string(balls) + "\n";
  out += "atom at-robby-rooma\natom at-robby-roomb\natom free-left\natom free-right\n";
  for (std::uint64_t b = 0; b < balls; ++b) {
    const std::string ball = "ball" + std::to_string(b);
    for (const char* r : rooms) out += "atom at-" + ball + "-" + r + "\n";
    for (const char* h : hands) out += "atom carry-" + ball + "-" + h + "\n";
  }
  out += "mutex at-robby-rooma at-robby-roomb\n";
  for (std::uint64_t b = 0; b < balls; ++b) {
    const std::string ball = "ball" + std::to_string(b);
    out += "mutex at-" + ball + "-rooma at-" + ball + "-roomb carry-" + ball + "-left carry-" + ball + "-right\n";
  }
  out += "init at-robby-rooma free-left free-right";
  for (std::uint64_t b = 0; b < balls; ++b) out += " at-ball" + std::to_string(b) + "-rooma";
  out += "\ngoal";
  for (std::uint64_t b = 0; b < balls; ++b) out += " +at-ball" + std::to_string(b) + "-roomb";
  out += "\n";
  for (int from = 0; from < 2; ++from) {
    const std::string a = rooms[from];
    const std::string b = rooms[1 - from];
    out += "action move-" + a + "-" + b + " 1\npre +at-robby-" + a + "\nadd at-robby-" + b + "\ndel at-robby-" + a +
           "\nend\n";
  }
  for (std::uint64_t i = 0; i < balls; ++i) {
    const std::string ball = "ball" + std::to_string(i);
    for (const char* r : rooms) {
      for (const char* h : hands) {
        const std::string room = r;
        const std::string hand = h;
        out += "action pick-" + ball + "-" + room + "-" + hand + " 1\n";
        out += "pre +at-" + ball + "-" + room + " +at-robby-" + room + " +free-" + hand + "\n";
        out += "add carry-" + ball + "-" + hand + "\n";
        out += "del at-" + ball + "-" + room + " free-" + hand + "\nend\n";
        out += "action drop-" + ball + "-" + room + "-" + hand + " 1\n";
        out += "pre +carry-" + ball + "-" + hand + " +at-robby-" + room + "\n";
        out += "add at-" + ball + "-" + room + " free-" + hand + "\n";
        out += "del carry-" + ball + "-" + hand + "\nend\n";
      }
    }
  }
  return out;
}

// Variable j and j+G always hold the same value, so packing them into the
// same word keeps every successor's change inside one word.
std::string paired(std::uint64_t pairs) {
  const std::uint64_t vars = 2 * pairs;
  const auto atom = [](std::uint64_t v, std::uint64_t value) {
    return "x" + std::to_string(v) + "_" + std::to_string(value);
  };
  std::string out = "gtf 1\n# paired " + std::to_string(pairs) + "\n";
  for (std::uint64_t v = 0; v < vars; ++v)
    for (std::uint64_t x = 0; x < 3; ++x) out += "atom " + atom(v, x) + "\n";
  for (std::uint64_t v = 0; v < vars; ++v) out += "mutex " + atom(v, 0) + " " + atom(v, 1) + " " + atom(v, 2) + "\n";
  out += "init";
  for (std::uint64_t v = 0; v < vars; ++v) out += " " + atom(v, 0);
  // Unreachable: the two halves of a pair never differ.
  out += "\ngoal +" + atom(0, 1) + " +" + atom(pairs, 0) + "\n";
  for (std::uint64_t j = 0; j < pairs; ++j) {
    for (std::uint64_t x = 0; x < 3; ++x) {
      const std::uint64_t y = (x + 1) % 3;
      out += "action step_" + std::to_string(j) + "_" + std::to_string(x) + " 1\n";
      out += "pre +" + atom(j, x) + " +" + atom(j + pairs, x) + "\n";
      out += "add " + atom(j, y) + " " + atom(j + pairs, y) + "\n";
      out += "del " + atom(j, x) + " " + atom(j + pairs, x) + "\nend\n";
    }
  }
  return out;
}

}  // namespace

GeneratorSpec parse_generator_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw ValidationError("generator spec must look like kind:param");
  GeneratorSpec out;
  out.kind = std::string(spec.substr(0, colon));
  const std::string_view num = spec.substr(colon + 1);
  const auto r = std::from_chars(num.data(), num.data() + num.size(), out.param);
  if (r.ec != std::errc{} || r.ptr != num.data() + num.size())
    throw ValidationError("generator parameter must be a positive integer: '" + std::string(num) + "'");
  return out;
}

std::string generate_task(const GeneratorSpec& spec) {
  const std::uint64_t n = spec.param;
  if (n == 0) throw ValidationError("generator parameter must be positive");
  if (spec.kind == "chain") return chain(n);
  if (spec.kind == "counter" || spec.kind == "numeric-counter") {
    if (n > 40) throw ValidationError("counter width must be at most 40 bits");
    return counter(n, spec.kind == "numeric-counter");
  }
  if (spec.kind == "gripper") return gripper(n);
  if (spec.kind == "paired") return paired(n);
  throw ValidationError("unknown generator '" + spec.kind + "' (chain, counter, gripper, numeric-counter, paired)");
}

}  // namespace dtdb
