#pragma once

#include "caafc/prompt.hpp"

namespace caafc::prompts {

// Versioned template assets. Bodies are the module prompts exactly as the
// framework ships them; placeholder names are the only variable parts.

const PromptTemplate& segmentation();     // {text}
const PromptTemplate& primary_sources();  // {claim}
const PromptTemplate& fact_check();       // {claim}, {evidence}
const PromptTemplate& justifier();        // {claim}, {evidence}, {json_object}
const PromptTemplate& revisory();         // {justification}, {feedback}
const PromptTemplate& comparison();       // {claim}, {evidence1}, {evidence2}
const PromptTemplate& judge();  // {claim}, {false_subclaims}, {justification},
                                // {functional_links}

// All assets by name; throws InvariantViolation for unknown names.
const PromptTemplate& by_name(const std::string& name);

}  // namespace caafc::prompts
