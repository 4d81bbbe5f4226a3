#pragma once

// Minimal s-expression reader: atoms, (lists) and [vectors], with positions.

#include "rtree/errors.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace rtree::sexpr {

struct Node {
    enum class Kind { atom, list, vector };
    Kind kind = Kind::atom;
    std::string text;  // atoms only
    std::vector<Node> items;
    std::size_t line = 1;
    std::size_t column = 1;

    bool is_atom() const { return kind == Kind::atom; }
    bool is_list() const { return kind == Kind::list; }
    bool is_vector() const { return kind == Kind::vector; }
    /// Head symbol of a list, or "" for anything else.
    std::string_view head() const {
        if (!is_list() || items.empty() || !items[0].is_atom()) return {};
        return items[0].text;
    }
    [[noreturn]] void fail(const std::string& what) const { throw parse_error(what, line, column); }
};

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    /// All top-level forms.
    std::vector<Node> read_all() {
        std::vector<Node> out;
        for (;;) {
            skip();
            if (pos_ >= text_.size()) return out;
            out.push_back(read());
        }
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0, line_ = 1, col_ = 1;

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void skip() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }
    static bool delimiter(char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '[' || c == ']' || c == ';';
    }

    Node read() {
        Node n;
        n.line = line_;
        n.column = col_;
        char c = text_[pos_];
        if (c == ')' || c == ']') throw parse_error(std::string("unexpected '") + c + "'", line_, col_);
        if (c == '(' || c == '[') {
            char close = c == '(' ? ')' : ']';
            n.kind = c == '(' ? Node::Kind::list : Node::Kind::vector;
            advance();
            for (;;) {
                skip();
                if (pos_ >= text_.size()) throw parse_error(std::string("missing '") + close + "'", n.line, n.column);
                if (text_[pos_] == close) {
                    advance();
                    return n;
                }
                if (text_[pos_] == (close == ')' ? ']' : ')'))
                    throw parse_error(std::string("expected '") + close + "'", line_, col_);
                n.items.push_back(read());
            }
        }
        while (pos_ < text_.size() && !delimiter(text_[pos_])) {
            n.text += text_[pos_];
            advance();
        }
        return n;
    }
};

/// Keyword arguments `:key value ...` of a list starting at index `from`.
struct Keywords {
    const Node* owner = nullptr;
    std::vector<std::pair<std::string, const Node*>> entries;

    static Keywords of(const Node& list, std::size_t from) {
        Keywords k;
        k.owner = &list;
        for (std::size_t i = from; i < list.items.size(); i += 2) {
            const Node& key = list.items[i];
            if (!key.is_atom() || key.text.size() < 2 || key.text[0] != ':') key.fail("expected a :keyword");
            if (i + 1 >= list.items.size()) key.fail("keyword " + key.text + " has no value");
            for (auto& [name, _] : k.entries)
                if (name == key.text.substr(1)) key.fail("duplicate keyword " + key.text);
            k.entries.emplace_back(key.text.substr(1), &list.items[i + 1]);
        }
        return k;
    }
    const Node* find(std::string_view name) const {
        for (auto& [k, v] : entries)
            if (k == name) return v;
        return nullptr;
    }
    const Node& need(std::string_view name) const {
        if (auto* n = find(name)) return *n;
        owner->fail("missing :" + std::string(name));
    }
    void allow_only(std::initializer_list<std::string_view> names) const {
        for (auto& [k, v] : entries) {
            bool ok = false;
            for (auto n : names) ok = ok || n == k;
            if (!ok) v->fail("unknown keyword :" + k);
        }
    }
};

}  // namespace rtree::sexpr
