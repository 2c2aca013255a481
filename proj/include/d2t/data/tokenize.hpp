#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace d2t::data {

// Summary tokenizer:
//  - text from a "Game notes" heading onward is dropped;
//  - whitespace splits chunks; surrounding punctuation is split off, except
//    the period of a single-capital initial ("C.") and decimals ("8.0");
//  - hyphen runs become their own tokens ("7--for--9" -> 7 -- for -- 9);
//  - a trailing "'s" or "'" is split off;
//  - sentences end at ". ! ?" and any sentence containing a quotation mark
//    is removed.
std::vector<std::string> tokenize_summary(std::string_view text);

// Whitespace split, used for pre-tokenized text and entity strings.
std::vector<std::string> split_whitespace(std::string_view text);

bool is_number_token(std::string_view token);
bool is_sentence_end(std::string_view token);

}  // namespace d2t::data
