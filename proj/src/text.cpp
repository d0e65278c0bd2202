#include "caafc/text.hpp"

#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>

#include "caafc/errors.hpp"

namespace caafc {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_ws = true;  // swallows leading whitespace
  for (char c : s) {
    if (is_space(c)) {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out.push_back(' ');
    in_ws = false;
    out.push_back(c);
  }
  return out;
}

std::string casefold(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string normalize_match(std::string_view s) {
  std::string out = collapse_ws(casefold(s));
  while (!out.empty()) {
    char c = out.back();
    if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?')
      out.pop_back();
    else
      break;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // offset basis
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;  // prime
  }
  return h;
}

std::string hash16(std::string_view s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(s)));
  return buf;
}

std::vector<std::string> extract_urls(std::string_view text) {
  std::vector<std::string> out;
  auto seen = [&](const std::string& u) {
    for (const auto& v : out)
      if (v == u) return true;
    return false;
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t h = text.find("http", pos);
    if (h == std::string_view::npos) break;
    std::string_view rest = text.substr(h);
    std::size_t scheme_len = 0;
    if (rest.rfind("https://", 0) == 0)
      scheme_len = 8;
    else if (rest.rfind("http://", 0) == 0)
      scheme_len = 7;
    if (scheme_len == 0 || rest.size() <= scheme_len) {
      pos = h + 4;
      continue;
    }
    std::size_t end = scheme_len;
    while (end < rest.size() && !is_space(rest[end]) && rest[end] != '<' &&
           rest[end] != '>' && rest[end] != '"' && rest[end] != '\'')
      ++end;
    std::string url(rest.substr(0, end));
    // Strip trailing punctuation that belongs to the sentence, not the URL.
    while (!url.empty()) {
      char c = url.back();
      if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' ||
          c == '?' || c == ')' || c == ']' || c == '}')
        url.pop_back();
      else
        break;
    }
    if (url.size() > scheme_len && !seen(url)) out.push_back(url);
    pos = h + (end > 0 ? end : 4);
  }
  return out;
}

std::string quoted_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += '"';
    for (char c : items[i]) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    out += '"';
  }
  out += "]";
  return out;
}

std::string join(const std::vector<std::string>& items,
                 std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += separator;
    out += items[i];
  }
  return out;
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void atomic_write_file(const std::filesystem::path& path,
                       std::string_view content) {
  namespace fs = std::filesystem;
  fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  // Unique temp name: pid + address-derived counter keeps concurrent writers
  // of the same target apart.
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open temp file for " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("rename failed for " + path.string() + ": " + ec.message());
  }
}

std::string now_iso8601_utc() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string today_utc() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[16];
  std::strftime(buf, sizeof(buf), "%Y-%m-%d", &tm);
  return buf;
}

}  // namespace caafc
