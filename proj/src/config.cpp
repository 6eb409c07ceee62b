#include "coastline/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace coastline {

namespace {

using nlohmann::json;

struct Parser {
    std::string origin;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(origin + ":" + std::to_string(line_no) + ": " + msg);
    }

    static bool is_bare(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    static void trim(std::string& s) {
        size_t b = s.find_first_not_of(" \t\r");
        size_t e = s.find_last_not_of(" \t\r");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }

    // Removes a trailing comment, respecting quoted strings.
    static std::string strip_comment(const std::string& s) {
        bool quoted = false;
        for (size_t i = 0; i < s.size(); ++i) {
            char c = s[i];
            if (quoted && c == '\\' && i + 1 < s.size()) {
                ++i;
                continue;
            }
            if (c == '"')
                quoted = !quoted;
            else if (c == '#' && !quoted)
                return s.substr(0, i);
        }
        return s;
    }

    std::string parse_string(const std::string& s, size_t& pos) const {
        std::string out;
        ++pos; // opening quote
        while (pos < s.size() && s[pos] != '"') {
            char c = s[pos++];
            if (c == '\\') {
                if (pos >= s.size())
                    fail("dangling escape in string");
                char e = s[pos++];
                switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out += c;
            }
        }
        if (pos >= s.size())
            fail("unterminated string");
        ++pos; // closing quote
        return out;
    }

    json parse_scalar(const std::string& s, size_t& pos) const {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t'))
            ++pos;
        if (pos >= s.size())
            fail("missing value");
        if (s[pos] == '"')
            return parse_string(s, pos);
        if (s[pos] == '[') {
            ++pos;
            json arr = json::array();
            for (;;) {
                while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t'))
                    ++pos;
                if (pos >= s.size())
                    fail("unterminated array");
                if (s[pos] == ']') {
                    ++pos;
                    return arr;
                }
                arr.push_back(parse_scalar(s, pos));
                while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t'))
                    ++pos;
                if (pos < s.size() && s[pos] == ',')
                    ++pos;
                else if (pos >= s.size() || s[pos] != ']')
                    fail("expected ',' or ']' in array");
            }
        }
        size_t start = pos;
        while (pos < s.size() && s[pos] != ',' && s[pos] != ']' && s[pos] != ' ' &&
               s[pos] != '\t')
            ++pos;
        std::string tok = s.substr(start, pos - start);
        if (tok.empty())
            fail("missing value");
        if (tok == "true")
            return true;
        if (tok == "false")
            return false;

        const char* first = tok.data();
        const char* last = tok.data() + tok.size();
        int64_t iv = 0;
        auto ir = std::from_chars(first, last, iv);
        if (ir.ec == std::errc() && ir.ptr == last)
            return iv;
        double dv = 0.0;
        auto dr = std::from_chars(first, last, dv);
        if (dr.ec == std::errc() && dr.ptr == last)
            return dv;
        fail("cannot parse value '" + tok + "'");
    }

    // Splits a dotted table name into parts.
    std::vector<std::string> parse_name(const std::string& s) const {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : s) {
            if (c == '.') {
                if (cur.empty())
                    fail("empty name component in '" + s + "'");
                parts.push_back(cur);
                cur.clear();
            } else if (is_bare(c)) {
                cur += c;
            } else {
                fail(std::string("unexpected character '") + c + "' in table name");
            }
        }
        if (cur.empty())
            fail("empty name component in '" + s + "'");
        parts.push_back(cur);
        return parts;
    }

    json parse(std::istream& in) {
        json root = json::object();
        json* current = &root;
        std::string raw;
        while (std::getline(in, raw)) {
            ++line_no;
            std::string line = strip_comment(raw);
            trim(line);
            if (line.empty())
                continue;

            if (line.front() == '[') {
                bool array_table = line.size() > 1 && line[1] == '[';
                std::string close = array_table ? "]]" : "]";
                if (line.size() < 2 * close.size() + 1 || line.substr(line.size() - close.size()) != close)
                    fail("malformed table header '" + line + "'");
                std::string name =
                    line.substr(close.size(), line.size() - 2 * close.size());
                trim(name);
                std::vector<std::string> parts = parse_name(name);

                json* node = &root;
                for (size_t i = 0; i + 1 < parts.size(); ++i) {
                    json& next = (*node)[parts[i]];
                    if (next.is_null())
                        next = json::object();
                    if (next.is_array())
                        node = &next.back();
                    else if (next.is_object())
                        node = &next;
                    else
                        fail("'" + parts[i] + "' is not a table");
                }
                json& leaf = (*node)[parts.back()];
                if (array_table) {
                    if (leaf.is_null())
                        leaf = json::array();
                    if (!leaf.is_array())
                        fail("'" + parts.back() + "' is not an array of tables");
                    leaf.push_back(json::object());
                    current = &leaf.back();
                } else {
                    if (leaf.is_null())
                        leaf = json::object();
                    if (!leaf.is_object())
                        fail("'" + parts.back() + "' is not a table");
                    current = &leaf;
                }
                continue;
            }

            size_t eq = std::string::npos;
            {
                bool quoted = false;
                for (size_t i = 0; i < line.size(); ++i) {
                    if (line[i] == '"')
                        quoted = !quoted;
                    else if (line[i] == '=' && !quoted) {
                        eq = i;
                        break;
                    }
                }
            }
            if (eq == std::string::npos)
                fail("expected 'key = value', got '" + line + "'");
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            trim(key);
            trim(value);
            if (key.empty())
                fail("empty key");
            for (char c : key)
                if (!is_bare(c))
                    fail("invalid key '" + key + "'");
            if ((*current).contains(key))
                fail("duplicate key '" + key + "'");

            size_t pos = 0;
            json v = parse_scalar(value, pos);
            while (pos < value.size() && (value[pos] == ' ' || value[pos] == '\t'))
                ++pos;
            if (pos != value.size())
                fail("trailing characters after value: '" + value.substr(pos) + "'");
            (*current)[key] = std::move(v);
        }
        return root;
    }
};

} // namespace

nlohmann::json parse_toml(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    Parser p{origin};
    return p.parse(in);
}

nlohmann::json parse_toml_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config " + path);
    Parser p{path};
    return p.parse(in);
}

} // namespace coastline
