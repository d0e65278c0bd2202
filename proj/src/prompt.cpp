#include "caafc/prompt.hpp"

#include <cctype>
#include <optional>

#include "caafc/errors.hpp"

namespace caafc {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// If body[pos] opens a "{identifier}" placeholder, returns its name and sets
// *end one past the closing brace.
std::optional<std::string> placeholder_at(const std::string& body,
                                          std::size_t pos, std::size_t* end) {
  if (body[pos] != '{' || pos + 1 >= body.size()) return std::nullopt;
  std::size_t i = pos + 1;
  if (!ident_start(body[i])) return std::nullopt;
  std::size_t name_begin = i;
  while (i < body.size() && ident_char(body[i])) ++i;
  if (i >= body.size() || body[i] != '}') return std::nullopt;
  *end = i + 1;
  return body.substr(name_begin, i - name_begin);
}

}  // namespace

std::set<std::string> scan_placeholders(const std::string& body) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    std::size_t end = 0;
    if (auto name = placeholder_at(body, i, &end)) {
      out.insert(*name);
      i = end - 1;
    }
  }
  return out;
}

PromptTemplate make_template(std::string name, std::string body) {
  std::set<std::string> placeholders = scan_placeholders(body);
  return PromptTemplate{std::move(name), std::move(body),
                        std::move(placeholders)};
}

std::string render(const PromptTemplate& tmpl,
                   const std::map<std::string, std::string>& bindings) {
  std::set<std::string> scanned = scan_placeholders(tmpl.body);
  for (const auto& name : tmpl.required_placeholders)
    if (!bindings.count(name)) throw MissingPlaceholder(name);
  // No marker may survive rendering, so placeholders outside the required
  // set still need bindings.
  for (const auto& name : scanned)
    if (!bindings.count(name)) throw MissingPlaceholder(name);
  for (const auto& [name, value] : bindings) {
    (void)value;
    if (!scanned.count(name)) throw UnknownPlaceholder(name);
  }

  std::string out;
  out.reserve(tmpl.body.size());
  for (std::size_t i = 0; i < tmpl.body.size();) {
    std::size_t end = 0;
    if (auto name = placeholder_at(tmpl.body, i, &end)) {
      out += bindings.at(*name);
      i = end;
    } else {
      out += tmpl.body[i];
      ++i;
    }
  }
  return out;
}

}  // namespace caafc
