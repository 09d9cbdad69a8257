#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 helpers for Spanish text. Case mapping covers ASCII and the
// Latin-1 supplement, which is all the pipeline ever sees.
namespace morphgen::text {

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view codepoints);

char32_t to_lower(char32_t c);
char32_t to_upper(char32_t c);

std::string lowercase(std::string_view utf8);
bool has_uppercase(std::string_view utf8);
// Uppercases the first code point only.
std::string capitalize_first(std::string_view utf8);

std::vector<std::string> split_whitespace(std::string_view line);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view s);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view s);

}  // namespace morphgen::text
