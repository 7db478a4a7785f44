#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "laughkit/error.hpp"

namespace laughkit {

// Minimal XML document model, just enough for OpenCV-style cascade files:
// elements, attributes, character data, comments, and an XML prolog. No
// namespaces, CDATA, or DOCTYPE. Line numbers are kept for error reporting.
struct XmlNode {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<XmlNode> children;
    std::string text; // concatenated character data directly inside this element
    int line = 0;

    const XmlNode* child(std::string_view child_name) const {
        for (const auto& c : children) {
            if (c.name == child_name) return &c;
        }
        return nullptr;
    }

    std::vector<const XmlNode*> children_named(std::string_view child_name) const {
        std::vector<const XmlNode*> out;
        for (const auto& c : children) {
            if (c.name == child_name) out.push_back(&c);
        }
        return out;
    }

    std::optional<std::string> attr(std::string_view key) const {
        for (const auto& [k, v] : attrs) {
            if (k == key) return v;
        }
        return std::nullopt;
    }
};

namespace detail {

class XmlParser {
public:
    explicit XmlParser(std::string_view src) : src_(src) {}

    XmlNode parse_document() {
        skip_misc();
        if (eof()) fail("document has no root element");
        XmlNode root = parse_element();
        skip_misc();
        if (!eof()) fail("content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        raise(errc::xml_malformed, "xml: line " + std::to_string(line_) + ": " + what);
    }

    bool eof() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }

    char advance() {
        char c = src_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    bool starts_with(std::string_view s) const {
        return src_.compare(pos_, s.size(), s) == 0;
    }

    void expect(std::string_view s) {
        if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
        for (std::size_t i = 0; i < s.size(); ++i) advance();
    }

    static bool is_space(char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r';
    }

    static bool is_name_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':';
    }

    static bool is_name_char(char c) {
        return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
    }

    void skip_space() {
        while (!eof() && is_space(peek())) advance();
    }

    // whitespace, comments, and processing instructions between elements
    void skip_misc() {
        for (;;) {
            skip_space();
            if (starts_with("<!--")) {
                skip_comment();
            } else if (starts_with("<?")) {
                skip_pi();
            } else {
                return;
            }
        }
    }

    void skip_comment() {
        expect("<!--");
        while (!eof()) {
            if (starts_with("-->")) {
                expect("-->");
                return;
            }
            advance();
        }
        fail("unterminated comment");
    }

    void skip_pi() {
        expect("<?");
        while (!eof()) {
            if (starts_with("?>")) {
                expect("?>");
                return;
            }
            advance();
        }
        fail("unterminated processing instruction");
    }

    std::string parse_name() {
        if (eof() || !is_name_start(peek())) fail("expected a name");
        std::string name;
        while (!eof() && is_name_char(peek())) name.push_back(advance());
        return name;
    }

    std::string parse_attr_value() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail("expected a quoted attribute value");
        const char quote = advance();
        std::string value;
        while (!eof() && peek() != quote) {
            if (peek() == '<') fail("'<' in attribute value");
            if (peek() == '&') {
                value += parse_entity();
            } else {
                value.push_back(advance());
            }
        }
        if (eof()) fail("unterminated attribute value");
        advance();
        return value;
    }

    std::string parse_entity() {
        expect("&");
        std::string ent;
        while (!eof() && peek() != ';' && ent.size() <= 6) ent.push_back(advance());
        if (eof() || peek() != ';') fail("unterminated entity reference");
        advance();
        if (ent == "lt") return "<";
        if (ent == "gt") return ">";
        if (ent == "amp") return "&";
        if (ent == "quot") return "\"";
        if (ent == "apos") return "'";
        fail("unknown entity '&" + ent + ";'");
    }

    XmlNode parse_element() {
        const int start_line = line_;
        expect("<");
        XmlNode node;
        node.line = start_line;
        node.name = parse_name();
        for (;;) {
            skip_space();
            if (eof()) fail("unterminated start tag '" + node.name + "'");
            if (peek() == '/') {
                expect("/>");
                return node;
            }
            if (peek() == '>') {
                advance();
                break;
            }
            std::string key = parse_name();
            skip_space();
            expect("=");
            skip_space();
            for (const auto& [k, v] : node.attrs) {
                if (k == key) fail("duplicate attribute '" + key + "'");
            }
            node.attrs.emplace_back(std::move(key), parse_attr_value());
        }
        // content: character data, child elements, comments
        for (;;) {
            if (eof()) fail("unterminated element '" + node.name + "'");
            if (peek() == '<') {
                if (starts_with("<!--")) {
                    skip_comment();
                } else if (starts_with("</")) {
                    expect("</");
                    std::string closing = parse_name();
                    if (closing != node.name) {
                        fail("mismatched closing tag '" + closing + "' for '" + node.name + "'");
                    }
                    skip_space();
                    expect(">");
                    return node;
                } else if (starts_with("<?") || starts_with("<!")) {
                    fail("unsupported markup inside element '" + node.name + "'");
                } else {
                    node.children.push_back(parse_element());
                }
            } else if (peek() == '&') {
                node.text += parse_entity();
            } else {
                node.text.push_back(advance());
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

} // namespace detail

inline XmlNode parse_xml(std::string_view src) {
    return detail::XmlParser(src).parse_document();
}

} // namespace laughkit
