#pragma once

// Scenario config files: a small TOML-like format.
//
//   name = "flux-obstruction"          # comment
//   fail_fast = false
//   [tolerances]
//   eq2_gauss = 1e-9
//   [chart.bumpy]
//   model = "custom"
//   phi = "0.1*x^2"
//   [[step]]
//   op = "necessary_condition"
//   deltas = [0.5, 1, 1.5]

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cmc/errors.hpp"

namespace cmc {

using ConfigValue = std::variant<bool, double, std::string, std::vector<double>>;

struct ConfigTable {
    std::string name;
    int line = 0;
    std::map<std::string, ConfigValue> values;
    std::map<std::string, int> key_lines;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    const ConfigValue* find(const std::string& key) const {
        auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    }
};

struct Config {
    ConfigTable root;
    std::map<std::string, ConfigTable> tables;
    std::vector<ConfigTable> steps;
};

inline std::string render(const ConfigValue& v) {
    struct {
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(double d) const {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            return buf;
        }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(const std::vector<double>& a) const {
            std::string out = "[";
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (i) out += ", ";
                out += (*this)(a[i]);
            }
            return out + "]";
        }
    } visitor;
    return std::visit(visitor, v);
}

namespace detail {

class ConfigParser {
public:
    explicit ConfigParser(std::string_view text) : text_(text) {}

    Config parse() {
        Config cfg;
        ConfigTable* current = &cfg.root;
        std::size_t pos = 0;
        line_ = 0;
        while (pos <= text_.size()) {
            std::size_t end = text_.find('\n', pos);
            if (end == std::string_view::npos) end = text_.size();
            ++line_;
            line_text_ = text_.substr(pos, end - pos);
            col_ = 0;
            parse_line(cfg, current);
            pos = end + 1;
        }
        return cfg;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, static_cast<int>(col_) + 1); }

    void skip_space() {
        while (col_ < line_text_.size() && (line_text_[col_] == ' ' || line_text_[col_] == '\t' || line_text_[col_] == '\r'))
            ++col_;
    }
    bool at_end_or_comment() {
        skip_space();
        return col_ >= line_text_.size() || line_text_[col_] == '#';
    }
    static bool key_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    }

    std::string read_key() {
        skip_space();
        const std::size_t start = col_;
        while (col_ < line_text_.size() && key_char(line_text_[col_])) ++col_;
        if (col_ == start) fail("expected a key");
        return std::string(line_text_.substr(start, col_ - start));
    }

    void parse_line(Config& cfg, ConfigTable*& current) {
        if (at_end_or_comment()) return;
        if (line_text_[col_] == '[') {
            const bool array = col_ + 1 < line_text_.size() && line_text_[col_ + 1] == '[';
            col_ += array ? 2 : 1;
            const std::string name = read_key();
            skip_space();
            if (line_text_.substr(col_, array ? 2 : 1) != (array ? "]]" : "]")) fail("unterminated table header");
            col_ += array ? 2 : 1;
            if (!at_end_or_comment()) fail("unexpected text after table header");
            if (array) {
                if (name != "step") fail("only [[step]] arrays are supported");
                cfg.steps.emplace_back();
                current = &cfg.steps.back();
            } else {
                if (cfg.tables.count(name)) fail("duplicate table [" + name + "]");
                current = &cfg.tables[name];
            }
            current->name = name;
            current->line = line_;
            return;
        }
        const std::size_t key_col = col_;
        const std::string key = read_key();
        skip_space();
        if (col_ >= line_text_.size() || line_text_[col_] != '=') fail("expected '=' after key '" + key + "'");
        ++col_;
        skip_space();
        ConfigValue v = read_value();
        if (!at_end_or_comment()) fail("unexpected text after value");
        if (current->values.count(key)) {
            col_ = key_col;
            fail("duplicate key '" + key + "'");
        }
        current->values[key] = std::move(v);
        current->key_lines[key] = line_;
    }

    double read_number() {
        skip_space();
        const std::string rest(line_text_.substr(col_));
        const char* begin = rest.c_str();
        char* end = nullptr;
        const double d = std::strtod(begin, &end);
        if (end == begin) fail("expected a number");
        col_ += static_cast<std::size_t>(end - begin);
        return d;
    }

    ConfigValue read_value() {
        if (col_ >= line_text_.size()) fail("missing value");
        const char c = line_text_[col_];
        if (c == '"') {
            ++col_;
            std::string s;
            while (true) {
                if (col_ >= line_text_.size()) fail("unterminated string");
                const char ch = line_text_[col_++];
                if (ch == '"') break;
                if (ch == '\\') {
                    if (col_ >= line_text_.size()) fail("dangling escape");
                    const char e = line_text_[col_++];
                    if (e == 'n') s += '\n';
                    else if (e == 't') s += '\t';
                    else if (e == '"' || e == '\\') s += e;
                    else fail("unknown escape");
                } else {
                    s += ch;
                }
            }
            return s;
        }
        if (c == '[') {
            ++col_;
            std::vector<double> a;
            skip_space();
            if (col_ < line_text_.size() && line_text_[col_] == ']') {
                ++col_;
                return a;
            }
            while (true) {
                a.push_back(read_number());
                skip_space();
                if (col_ >= line_text_.size()) fail("unterminated array");
                if (line_text_[col_] == ']') {
                    ++col_;
                    return a;
                }
                if (line_text_[col_] != ',') fail("expected ',' or ']' in array");
                ++col_;
            }
        }
        if (line_text_.substr(col_, 4) == "true" && (col_ + 4 == line_text_.size() || !key_char(line_text_[col_ + 4]))) {
            col_ += 4;
            return true;
        }
        if (line_text_.substr(col_, 5) == "false" && (col_ + 5 == line_text_.size() || !key_char(line_text_[col_ + 5]))) {
            col_ += 5;
            return false;
        }
        return read_number();
    }

    std::string_view text_;
    std::string_view line_text_;
    int line_ = 0;
    std::size_t col_ = 0;
};

}  // namespace detail

inline Config parse_config(std::string_view text) { return detail::ConfigParser(text).parse(); }

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace cmc
