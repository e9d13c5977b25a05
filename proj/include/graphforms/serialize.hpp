#pragma once

// Structured documents for reports. The text rendering walks the same
// document, so both output modes carry the same fields in the same order.

#include <string>

#include "graphforms/forms_engine.hpp"
#include "json.hpp"

namespace graphforms {

using Document = nlohmann::ordered_json;

Document to_document(const FormExpression& f);
Document to_document(const IntMatrix& m);
Document to_document(const Check& c);
Document to_document(const IdentityReport& r);
Document to_document(const FormReport& r);
Document to_document(const NumericResult& r);

/// Indented "key: value" lines; scalar arrays are written inline.
std::string render_text(const Document& doc);
/// Two-space indented JSON with a trailing newline.
std::string render_json(const Document& doc);

}  // namespace graphforms
