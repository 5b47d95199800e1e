#include "linkanomaly/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <system_error>

#include "json.hpp"

#include "linkanomaly/errors.hpp"

namespace linkanomaly {

namespace {

void check_post(Post& post, std::size_t line_number) {
  if (!std::isfinite(post.time) || post.time < 0.0)
    throw ParseError(line_number, "t", "time must be a non-negative finite number");
  if (post.user.empty())
    throw ParseError(line_number, "user", "user id must be non-empty");
  for (const auto& v : post.mentions) {
    if (v.empty())
      throw ParseError(line_number, "mentions", "mentionee ids must be non-empty");
  }
}

Post parse_jsonl(std::string_view line, std::size_t line_number) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_number, "record", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line_number, "record", "expected a JSON object");

  Post post;
  if (!j.contains("t") || !j["t"].is_number())
    throw ParseError(line_number, "t", "missing or non-numeric");
  post.time = j["t"].get<double>();
  if (!j.contains("user") || !j["user"].is_string())
    throw ParseError(line_number, "user", "missing or non-string");
  post.user = j["user"].get<std::string>();
  if (j.contains("mentions")) {
    if (!j["mentions"].is_array())
      throw ParseError(line_number, "mentions", "must be an array of strings");
    for (const auto& v : j["mentions"]) {
      if (!v.is_string())
        throw ParseError(line_number, "mentions", "must be an array of strings");
      post.mentions.push_back(v.get<std::string>());
    }
  }
  check_post(post, line_number);
  return post;
}

Post parse_tsv(std::string_view line, std::size_t line_number) {
  const auto tab1 = line.find('\t');
  if (tab1 == std::string_view::npos)
    throw ParseError(line_number, "record", "expected tab-separated fields");
  const auto tab2 = line.find('\t', tab1 + 1);

  const std::string_view time_field = line.substr(0, tab1);
  const std::string_view user_field =
      tab2 == std::string_view::npos ? line.substr(tab1 + 1)
                                     : line.substr(tab1 + 1, tab2 - tab1 - 1);
  const std::string_view mentions_field =
      tab2 == std::string_view::npos ? std::string_view{} : line.substr(tab2 + 1);

  Post post;
  const auto* begin = time_field.data();
  const auto* end = begin + time_field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, post.time);
  if (ec != std::errc{} || ptr != end)
    throw ParseError(line_number, "t", "time must be a number");
  post.user.assign(user_field);

  std::string_view rest = mentions_field;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item =
        comma == std::string_view::npos ? rest : rest.substr(0, comma);
    post.mentions.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  check_post(post, line_number);
  return post;
}

}  // namespace

Post parse_post(std::string_view line, std::size_t line_number, StreamFormat format) {
  if (format == StreamFormat::kAuto) {
    const auto first = line.find_first_not_of(" \t");
    format = (first != std::string_view::npos && line[first] == '{')
                 ? StreamFormat::kJsonl
                 : StreamFormat::kTsv;
  }
  return format == StreamFormat::kJsonl ? parse_jsonl(line, line_number)
                                        : parse_tsv(line, line_number);
}

std::vector<Post> load_posts(std::istream& in, StreamFormat format) {
  std::vector<Post> posts;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    posts.push_back(parse_post(line, line_number, format));
  }
  return posts;
}

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace linkanomaly
