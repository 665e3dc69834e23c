#include "perfminer/diff.hpp"

#include "perfminer/errors.hpp"

#include <algorithm>
#include <cctype>

namespace perfminer {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, eol - pos));
        pos = eol + 1;
    }
    return lines;
}

std::string strip_diff_prefix(std::string path) {
    if (path.rfind("a/", 0) == 0 || path.rfind("b/", 0) == 0) return path.substr(2);
    return path;
}

// "-12,3" or "-12" -> (12, 3); count defaults to 1.
bool parse_range(const std::string& s, std::size_t& pos, long& start, long& count) {
    std::size_t begin = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == begin) return false;
    start = std::stol(s.substr(begin, pos - begin));
    count = 1;
    if (pos < s.size() && s[pos] == ',') {
        ++pos;
        begin = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == begin) return false;
        count = std::stol(s.substr(begin, pos - begin));
    }
    return true;
}

bool parse_hunk_header(const std::string& line, DiffHunk& hunk) {
    // @@ -old[,n] +new[,m] @@ optional context
    if (line.rfind("@@ -", 0) != 0) return false;
    std::size_t pos = 4;
    if (!parse_range(line, pos, hunk.old_start, hunk.old_count)) return false;
    if (pos + 2 > line.size() || line[pos] != ' ' || line[pos + 1] != '+') return false;
    pos += 2;
    if (!parse_range(line, pos, hunk.new_start, hunk.new_count)) return false;
    if (line.compare(pos, 3, " @@") != 0) return false;
    pos += 3;
    if (pos < line.size() && line[pos] == ' ') ++pos;
    hunk.context = line.substr(pos);
    return true;
}

} // namespace

std::vector<DiffFile> parse_unified_diff(const std::string& diff) {
    std::vector<DiffFile> files;
    DiffFile* file = nullptr;
    DiffHunk* hunk = nullptr;
    long remaining_old = 0, remaining_new = 0;

    auto lines = split_lines(diff);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        long line_no = static_cast<long>(i) + 1;

        if (hunk && (remaining_old > 0 || remaining_new > 0)) {
            if (line.empty())
                throw ParseError("empty line inside hunk body", line_no);
            char prefix = line[0];
            if (prefix == '\\') {  // "\ No newline at end of file"
                hunk->lines.push_back(line);
                continue;
            }
            if (prefix == ' ') {
                --remaining_old;
                --remaining_new;
            } else if (prefix == '-') {
                --remaining_old;
            } else if (prefix == '+') {
                --remaining_new;
            } else {
                throw ParseError("unexpected hunk body prefix '" + std::string(1, prefix) + "'",
                                 line_no);
            }
            if (remaining_old < 0 || remaining_new < 0)
                throw ParseError("hunk body longer than its header claims", line_no);
            hunk->lines.push_back(line);
            continue;
        }

        if (line.rfind("diff --git ", 0) == 0) {
            files.emplace_back();
            file = &files.back();
            hunk = nullptr;
            continue;
        }
        if (line.rfind("--- ", 0) == 0) {
            if (!file || !file->old_path.empty()) {
                files.emplace_back();
                file = &files.back();
            }
            file->old_path = strip_diff_prefix(line.substr(4));
            hunk = nullptr;
            continue;
        }
        if (line.rfind("+++ ", 0) == 0) {
            if (!file) throw ParseError("+++ header without ---", line_no);
            file->new_path = strip_diff_prefix(line.substr(4));
            continue;
        }
        if (line.rfind("@@", 0) == 0) {
            if (!file) throw ParseError("hunk header before any file header", line_no);
            DiffHunk parsed;
            if (!parse_hunk_header(line, parsed))
                throw ParseError("malformed hunk header: " + line, line_no);
            file->hunks.push_back(std::move(parsed));
            hunk = &file->hunks.back();
            remaining_old = hunk->old_count;
            remaining_new = hunk->new_count;
            continue;
        }
        if (!line.empty() && (line[0] == '+' || line[0] == '-'))
            throw ParseError("change line outside any hunk (body longer than header?)", line_no);
        // index lines, mode changes, rename markers, binary notices
    }
    if (remaining_old > 0 || remaining_new > 0)
        throw ParseError("diff ends inside a hunk body");
    return files;
}

std::optional<Language> language_from_path(const std::string& path) {
    std::size_t dot = path.rfind('.');
    if (dot == std::string::npos) return std::nullopt;
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
    if (ext == "py") return Language::Python;
    if (ext == "cc" || ext == "cpp" || ext == "cxx" || ext == "c++" || ext == "hpp" ||
        ext == "h" || ext == "hh" || ext == "hxx")
        return Language::Cpp;
    if (ext == "java") return Language::Java;
    return std::nullopt;
}

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string trim_ws(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// "def foo(x):" / "async def foo(" / "class Foo:" -> name
std::string python_signature_name(const std::string& line) {
    std::string body = trim_ws(line);
    if (body.rfind("async ", 0) == 0) body = trim_ws(body.substr(6));
    const char* kw = nullptr;
    if (body.rfind("def ", 0) == 0)
        kw = "def ";
    else if (body.rfind("class ", 0) == 0)
        kw = "class ";
    else
        return "";
    std::size_t pos = std::string(kw).size();
    std::size_t start = pos;
    while (pos < body.size() && is_ident_char(body[pos])) ++pos;
    if (pos == start) return "";
    return body.substr(start, pos - start);
}

const char* kControlKeywords[] = {"if", "for", "while", "switch", "return", "catch",
                                  "sizeof", "else", "do", "case", "new", "throw",
                                  "assert", "synchronized"};

// Heuristic signature recognizer for C++/Java: an identifier directly before
// '(' on a line that is not a statement. Good enough for hunk attribution;
// AST accuracy is out of scope.
std::string c_like_signature_name(const std::string& line) {
    std::string body = trim_ws(line);
    if (body.empty()) return "";
    char first = body[0];
    if (first == '#' || first == '/' || first == '*' || first == '{' || first == '}')
        return "";
    std::size_t paren = body.find('(');
    if (paren == std::string::npos || paren == 0) return "";
    if (body.find('=') != std::string::npos && body.find('=') < paren) return "";
    if (body.back() == ';') return "";

    std::size_t end = paren;
    while (end > 0 && (body[end - 1] == ' ' || body[end - 1] == '\t')) --end;
    std::size_t start = end;
    while (start > 0 && (is_ident_char(body[start - 1]) || body[start - 1] == '~')) --start;
    if (start == end) return "";
    std::string name = body.substr(start, end - start);
    // Keep a qualifier chain like Foo::bar for display.
    while (start >= 2 && body[start - 1] == ':' && body[start - 2] == ':') {
        std::size_t qend = start - 2;
        std::size_t qstart = qend;
        while (qstart > 0 && is_ident_char(body[qstart - 1])) --qstart;
        if (qstart == qend) break;
        name = body.substr(qstart, qend - qstart) + "::" + name;
        start = qstart;
    }
    std::string head = name.substr(name.rfind(':') == std::string::npos
                                       ? 0
                                       : name.rfind(':') + 1);
    for (const char* kw : kControlKeywords)
        if (head == kw) return "";
    return name;
}

std::string signature_name(const std::string& content, std::optional<Language> lang) {
    if (!lang) return "";
    if (*lang == Language::Python) return python_signature_name(content);
    return c_like_signature_name(content);
}

} // namespace

std::string function_name_from_context(const std::string& context, std::optional<Language> lang) {
    if (context.empty()) return "";
    return signature_name(context, lang);
}

FunctionCount count_changed_functions(const std::string& diff) {
    return count_changed_functions(parse_unified_diff(diff));
}

FunctionCount count_changed_functions(const std::vector<DiffFile>& files) {
    FunctionCount out;
    for (const DiffFile& file : files) {
        std::optional<Language> lang = language_from_path(file.path());
        for (const DiffHunk& hunk : file.hunks) {
            // Walk the hunk tracking the nearest signature line; each changed
            // line attributes to it. A signature line inside the hunk is
            // closer to the change than the hunk-header context, which names
            // whatever function git last saw above the hunk, so the header
            // only seeds the walk. Catches single hunks spanning two
            // functions.
            std::string current = function_name_from_context(hunk.context, lang);
            bool anonymous_changes = false;
            std::vector<std::string> touched;
            for (const std::string& raw : hunk.lines) {
                if (raw.empty() || raw[0] == '\\') continue;
                std::string content = raw.substr(1);
                std::string name = signature_name(content, lang);
                if (!name.empty()) current = name;
                if (raw[0] != '+' && raw[0] != '-') continue;
                if (current.empty()) {
                    anonymous_changes = true;
                } else if (std::find(touched.begin(), touched.end(), current) == touched.end()) {
                    touched.push_back(current);
                }
            }
            if (anonymous_changes || (touched.empty() && !hunk.lines.empty())) {
                // Anonymous changes: conservatively their own function.
                FunctionChange change;
                change.file_path = file.path();
                change.hunks = 1;
                out.changes.push_back(std::move(change));
            }
            for (const std::string& name : touched) {
                auto it = std::find_if(out.changes.begin(), out.changes.end(),
                                       [&](const FunctionChange& c) {
                                           return c.file_path == file.path() &&
                                                  c.function_name == name;
                                       });
                if (it != out.changes.end())
                    ++it->hunks;
                else
                    out.changes.push_back({file.path(), name, "", "", 1});
            }
        }
    }
    out.count = out.changes.size();
    return out;
}

// --------------------------------------------------------- extraction ----

namespace {

std::size_t indent_width(const std::string& line) {
    std::size_t n = 0;
    while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
    return n;
}

bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::optional<std::string> extract_python_function(const std::string& source,
                                                   const std::string& name) {
    auto lines = split_lines(source);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (python_signature_name(lines[i]) != name) continue;
        std::size_t base_indent = indent_width(lines[i]);
        std::size_t last = i;
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            if (is_blank(lines[j])) continue;
            if (indent_width(lines[j]) <= base_indent) break;
            last = j;
        }
        std::string out;
        for (std::size_t j = i; j <= last; ++j) {
            out += lines[j];
            if (j != last) out += '\n';
        }
        return out;
    }
    return std::nullopt;
}

// true where source[i] is live code (not comment, not string literal).
std::vector<bool> code_mask(const std::string& s) {
    enum State { Normal, LineComment, BlockComment, DQuote, SQuote };
    std::vector<bool> mask(s.size(), false);
    State state = Normal;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        char next = i + 1 < s.size() ? s[i + 1] : '\0';
        switch (state) {
        case Normal:
            if (c == '/' && next == '/') {
                state = LineComment;
            } else if (c == '/' && next == '*') {
                state = BlockComment;
                ++i;
            } else if (c == '"') {
                mask[i] = true;  // the quote itself delimits code
                state = DQuote;
            } else if (c == '\'') {
                mask[i] = true;
                state = SQuote;
            } else {
                mask[i] = true;
            }
            break;
        case LineComment:
            if (c == '\n') state = Normal;
            break;
        case BlockComment:
            if (c == '*' && next == '/') {
                state = Normal;
                ++i;
            }
            break;
        case DQuote:
            if (c == '\\')
                ++i;
            else if (c == '"') {
                mask[i] = true;
                state = Normal;
            }
            break;
        case SQuote:
            if (c == '\\')
                ++i;
            else if (c == '\'') {
                mask[i] = true;
                state = Normal;
            }
            break;
        }
    }
    return mask;
}

std::optional<std::string> extract_c_like_function(const std::string& source,
                                                   const std::string& name) {
    std::string simple = name;
    std::size_t qual = simple.rfind("::");
    if (qual != std::string::npos) simple = simple.substr(qual + 2);
    if (simple.empty()) return std::nullopt;

    std::vector<bool> code = code_mask(source);

    for (std::size_t pos = source.find(simple); pos != std::string::npos;
         pos = source.find(simple, pos + 1)) {
        if (!code[pos]) continue;
        // Word boundary; allow a :: qualifier, reject member access.
        if (pos > 0) {
            char before = source[pos - 1];
            if (is_ident_char(before) || before == '.' || before == '>') continue;
        }
        std::size_t after = pos + simple.size();
        std::size_t p = after;
        while (p < source.size() && (source[p] == ' ' || source[p] == '\t')) ++p;
        if (p >= source.size() || source[p] != '(') continue;

        // Match the parameter list.
        long depth = 0;
        std::size_t close = std::string::npos;
        for (std::size_t i = p; i < source.size(); ++i) {
            if (!code[i]) continue;
            if (source[i] == '(') ++depth;
            if (source[i] == ')') {
                --depth;
                if (depth == 0) {
                    close = i;
                    break;
                }
            }
        }
        if (close == std::string::npos) continue;

        // Between ')' and '{': specifiers, throws clauses, or an initializer
        // list (parens only after ':'). ';' or a stray ')' means this was a
        // call or declaration.
        std::size_t brace = std::string::npos;
        bool saw_colon = false;
        long gap_depth = 0;
        bool rejected = false;
        for (std::size_t i = close + 1; i < source.size(); ++i) {
            if (!code[i]) continue;
            char c = source[i];
            if (c == '{' && gap_depth == 0) {
                brace = i;
                break;
            }
            if (c == ';') {
                rejected = true;
                break;
            }
            if (c == ':') {
                saw_colon = true;
                continue;
            }
            if (c == '(') {
                if (!saw_colon) {
                    rejected = true;
                    break;
                }
                ++gap_depth;
                continue;
            }
            if (c == ')') {
                if (gap_depth == 0) {
                    rejected = true;
                    break;
                }
                --gap_depth;
                continue;
            }
            if (is_ident_char(c) || c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                c == ',' || c == '&' || c == '*' || c == '<' || c == '>' || c == '[' ||
                c == ']')
                continue;
            rejected = true;
            break;
        }
        if (rejected || brace == std::string::npos) continue;

        // Brace-balanced body.
        depth = 0;
        std::size_t end = std::string::npos;
        for (std::size_t i = brace; i < source.size(); ++i) {
            if (!code[i]) continue;
            if (source[i] == '{') ++depth;
            if (source[i] == '}') {
                --depth;
                if (depth == 0) {
                    end = i;
                    break;
                }
            }
        }
        if (end == std::string::npos) continue;

        std::size_t line_start = source.rfind('\n', pos);
        line_start = line_start == std::string::npos ? 0 : line_start + 1;
        return source.substr(line_start, end - line_start + 1);
    }
    return std::nullopt;
}

} // namespace

std::optional<std::string> extract_function(const std::string& source, const std::string& name,
                                            Language lang) {
    if (name.empty() || source.empty()) return std::nullopt;
    if (lang == Language::Python) return extract_python_function(source, name);
    return extract_c_like_function(source, name);
}

} // namespace perfminer
