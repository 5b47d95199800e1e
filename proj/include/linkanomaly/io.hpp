#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "linkanomaly/mention_model.hpp"

namespace linkanomaly {

enum class StreamFormat {
  kAuto,   // per line: '{' starts a JSON record, anything else is tab-separated
  kJsonl,  // {"t": <seconds>, "user": <id>, "mentions": [<id>, ...]}
  kTsv,    // t <TAB> user <TAB> comma-separated mentions (third field optional)
};

// Parses one input line into a post. line_number is 1-based and only used
// for diagnostics. Throws ParseError naming the offending field.
Post parse_post(std::string_view line, std::size_t line_number,
                StreamFormat format = StreamFormat::kAuto);

// Reads a whole stream, skipping blank lines.
std::vector<Post> load_posts(std::istream& in, StreamFormat format = StreamFormat::kAuto);

// Shortest decimal form that parses back to exactly the same double. All
// emitted numbers go through this, so outputs are byte-stable across runs.
std::string format_double(double value);

}  // namespace linkanomaly
