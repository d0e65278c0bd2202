#pragma once

#include <map>
#include <set>
#include <string>

namespace caafc {

// A named prompt body with {identifier} placeholders. Placeholder names are
// C-style identifiers ([A-Za-z_][A-Za-z0-9_]*); literal JSON braces inside
// prompt bodies (e.g. worked examples) never qualify, so they survive
// rendering untouched.
struct PromptTemplate {
  std::string name;
  std::string body;
  std::set<std::string> required_placeholders;
};

// Every {identifier} placeholder occurring in body.
std::set<std::string> scan_placeholders(const std::string& body);

// Builds a template whose required set is exactly the scanned placeholders.
PromptTemplate make_template(std::string name, std::string body);

// Replaces each placeholder with its binding; every other byte of body is
// preserved. Throws MissingPlaceholder when a placeholder is unbound (the
// rendered output may contain no markers), UnknownPlaceholder when bindings
// name something the template lacks.
std::string render(const PromptTemplate& tmpl,
                   const std::map<std::string, std::string>& bindings);

}  // namespace caafc
