#include "sc/step/parse.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace sc::step {

namespace {

enum class Tok {
    Hash,      // #123
    Keyword,   // UPPERCASE_IDENT
    Number,
    String,
    Enum,      // .NAME.
    LParen,
    RParen,
    Comma,
    Equals,
    Semicolon,
    Dollar,
    Star,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    int id = 0;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws_and_comments();
        Token t;
        t.line = line_;
        t.col = col_;
        if (eof()) {
            t.kind = Tok::End;
            return t;
        }
        const char c = peek();
        if (c == '#') {
            advance();
            if (eof() || !std::isdigit(static_cast<unsigned char>(peek())))
                throw SyntaxError(t.line, t.col, "expected entity id after '#'");
            long v = 0;
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
                v = v * 10 + (peek() - '0');
                advance();
            }
            t.kind = Tok::Hash;
            t.id = static_cast<int>(v);
            return t;
        }
        if (c == '(') return simple(Tok::LParen);
        if (c == ')') return simple(Tok::RParen);
        if (c == ',') return simple(Tok::Comma);
        if (c == '=') return simple(Tok::Equals);
        if (c == ';') return simple(Tok::Semicolon);
        if (c == '$') return simple(Tok::Dollar);
        if (c == '*') return simple(Tok::Star);
        if (c == '\'') {
            advance();
            std::string s;
            while (true) {
                if (eof()) throw SyntaxError(t.line, t.col, "unterminated string");
                const char ch = peek();
                advance();
                if (ch == '\'') {
                    if (!eof() && peek() == '\'') {  // '' escape, kept verbatim
                        s.push_back('\'');
                        s.push_back('\'');
                        advance();
                        continue;
                    }
                    break;
                }
                s.push_back(ch);
            }
            t.kind = Tok::String;
            t.text = std::move(s);
            return t;
        }
        if (c == '.') {
            advance();
            std::string s;
            while (!eof() && peek() != '.') {
                s.push_back(peek());
                advance();
            }
            if (eof()) throw SyntaxError(t.line, t.col, "unterminated enumeration");
            advance();  // closing '.'
            t.kind = Tok::Enum;
            t.text = std::move(s);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-') {
            std::string s;
            s.push_back(c);
            advance();
            while (!eof()) {
                const char ch = peek();
                if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == 'E' ||
                    ch == 'e') {
                    s.push_back(ch);
                    advance();
                    if ((ch == 'E' || ch == 'e') && !eof() && (peek() == '+' || peek() == '-')) {
                        s.push_back(peek());
                        advance();
                    }
                } else {
                    break;
                }
            }
            try {
                t.number = std::stod(s);
            } catch (const std::exception&) {
                throw SyntaxError(t.line, t.col, "malformed number '" + s + "'");
            }
            t.kind = Tok::Number;
            t.text = std::move(s);
            return t;
        }
        if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (!eof()) {
                const char ch = peek();
                if (std::isupper(static_cast<unsigned char>(ch)) ||
                    std::isdigit(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-') {
                    s.push_back(ch);
                    advance();
                } else {
                    break;
                }
            }
            t.kind = Tok::Keyword;
            t.text = std::move(s);
            return t;
        }
        throw SyntaxError(t.line, t.col, std::string("unexpected character '") + c + "'");
    }

private:
    bool eof() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    Token simple(Tok k) {
        Token t;
        t.kind = k;
        t.line = line_;
        t.col = col_;
        advance();
        return t;
    }
    void skip_ws_and_comments() {
        while (!eof()) {
            const char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                const int l = line_, co = col_;
                advance();
                advance();
                while (true) {
                    if (eof()) throw SyntaxError(l, co, "unterminated comment");
                    if (peek() == '*' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                        advance();
                        advance();
                        break;
                    }
                    advance();
                }
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { bump(); }

    StepModel parse() {
        StepModel model;
        expect_keyword("ISO-10303-21");
        expect(Tok::Semicolon, "';'");
        expect_keyword("HEADER");
        expect(Tok::Semicolon, "';'");
        while (cur_.kind == Tok::Keyword && cur_.text != "ENDSEC") {
            HeaderRecord rec;
            rec.keyword = cur_.text;
            bump();
            expect(Tok::LParen, "'('");
            rec.args = parse_args();
            expect(Tok::RParen, "')'");
            expect(Tok::Semicolon, "';'");
            model.header.push_back(std::move(rec));
        }
        expect_keyword("ENDSEC");
        expect(Tok::Semicolon, "';'");
        expect_keyword("DATA");
        expect(Tok::Semicolon, "';'");
        while (cur_.kind == Tok::Hash) {
            const int id = cur_.id;
            const int line = cur_.line, col = cur_.col;
            bump();
            expect(Tok::Equals, "'='");
            if (cur_.kind == Tok::LParen)
                throw SyntaxError(cur_.line, cur_.col, "complex entity instances not supported");
            if (cur_.kind != Tok::Keyword)
                throw SyntaxError(cur_.line, cur_.col, "expected entity keyword");
            StepEntity ent;
            ent.id = id;
            ent.keyword = cur_.text;
            bump();
            expect(Tok::LParen, "'('");
            ent.args = parse_args();
            expect(Tok::RParen, "')'");
            expect(Tok::Semicolon, "';'");
            if (model.entities.count(id)) throw DuplicateId(id);
            (void)line;
            (void)col;
            model.entities.emplace(id, std::move(ent));
        }
        expect_keyword("ENDSEC");
        expect(Tok::Semicolon, "';'");
        expect_keyword("END-ISO-10303-21");
        expect(Tok::Semicolon, "';'");
        if (cur_.kind != Tok::End)
            throw SyntaxError(cur_.line, cur_.col, "trailing content after END-ISO-10303-21");

        check_references(model);
        return model;
    }

private:
    void bump() { cur_ = lex_.next(); }
    void expect(Tok k, const char* what) {
        if (cur_.kind != k) throw SyntaxError(cur_.line, cur_.col, std::string("expected ") + what);
        bump();
    }
    void expect_keyword(const std::string& kw) {
        if (cur_.kind != Tok::Keyword || cur_.text != kw)
            throw SyntaxError(cur_.line, cur_.col, "expected " + kw);
        bump();
    }

    ValueList parse_args() {
        ValueList args;
        if (cur_.kind == Tok::RParen) return args;
        args.push_back(parse_value());
        while (cur_.kind == Tok::Comma) {
            bump();
            args.push_back(parse_value());
        }
        return args;
    }

    Value parse_value() {
        switch (cur_.kind) {
            case Tok::Number: {
                const double v = cur_.number;
                bump();
                return Value{v};
            }
            case Tok::String: {
                std::string s = cur_.text;
                bump();
                return Value{std::move(s)};
            }
            case Tok::Enum: {
                EnumValue e{cur_.text};
                bump();
                return Value{e};
            }
            case Tok::Hash: {
                EntityRef r{cur_.id};
                bump();
                return Value{r};
            }
            case Tok::Dollar:
                bump();
                return Value{Unset{}};
            case Tok::Star:
                bump();
                return Value{Derived{}};
            case Tok::LParen: {
                bump();
                ValueList l = parse_args();
                expect(Tok::RParen, "')'");
                return Value{std::move(l)};
            }
            case Tok::Keyword: {
                auto tv = std::make_shared<TypedValue>();
                tv->keyword = cur_.text;
                bump();
                expect(Tok::LParen, "'('");
                tv->args = parse_args();
                expect(Tok::RParen, "')'");
                return Value{std::move(tv)};
            }
            default:
                throw SyntaxError(cur_.line, cur_.col, "expected parameter value");
        }
    }

    static void check_value_refs(const Value& v, const StepModel& model) {
        if (const auto* r = std::get_if<EntityRef>(&v.base())) {
            if (!model.has(r->id)) throw UnresolvedReference(r->id);
        } else if (const auto* l = std::get_if<ValueList>(&v.base())) {
            for (const auto& x : *l) check_value_refs(x, model);
        } else if (const auto* t = std::get_if<std::shared_ptr<TypedValue>>(&v.base())) {
            for (const auto& x : (*t)->args) check_value_refs(x, model);
        }
    }

    static void check_references(const StepModel& model) {
        for (const auto& [id, ent] : model.entities)
            for (const auto& a : ent.args) check_value_refs(a, model);
    }

    Lexer lex_;
    Token cur_;
};

void serialize_value(std::ostream& os, const Value& v) {
    struct Visitor {
        std::ostream& os;
        void operator()(double d) const {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", d);
            os << buf;
            // keep reals recognizable as reals
            std::string_view s(buf);
            if (s.find('.') == std::string_view::npos && s.find('e') == std::string_view::npos &&
                s.find('E') == std::string_view::npos && s.find("inf") == std::string_view::npos &&
                s.find("nan") == std::string_view::npos)
                os << '.';
        }
        void operator()(const std::string& s) const { os << '\'' << s << '\''; }
        void operator()(const EnumValue& e) const { os << '.' << e.name << '.'; }
        void operator()(const EntityRef& r) const { os << '#' << r.id; }
        void operator()(const Unset&) const { os << '$'; }
        void operator()(const Derived&) const { os << '*'; }
        void operator()(const ValueList& l) const {
            os << '(';
            for (std::size_t i = 0; i < l.size(); ++i) {
                if (i) os << ',';
                serialize_value(os, l[i]);
            }
            os << ')';
        }
        void operator()(const std::shared_ptr<TypedValue>& t) const {
            os << t->keyword << '(';
            for (std::size_t i = 0; i < t->args.size(); ++i) {
                if (i) os << ',';
                serialize_value(os, t->args[i]);
            }
            os << ')';
        }
    };
    std::visit(Visitor{os}, v.base());
}

}  // namespace

const StepEntity& StepModel::at(int id) const {
    auto it = entities.find(id);
    if (it == entities.end()) throw UnresolvedReference(id);
    return it->second;
}

StepModel parse_step(std::string_view bytes) { return Parser(bytes).parse(); }

std::string serialize(const StepModel& model) {
    std::ostringstream os;
    os << "ISO-10303-21;\nHEADER;\n";
    for (const auto& rec : model.header) {
        os << rec.keyword << '(';
        for (std::size_t i = 0; i < rec.args.size(); ++i) {
            if (i) os << ',';
            serialize_value(os, rec.args[i]);
        }
        os << ");\n";
    }
    os << "ENDSEC;\nDATA;\n";
    for (const auto& [id, ent] : model.entities) {
        os << '#' << id << " = " << ent.keyword << '(';
        for (std::size_t i = 0; i < ent.args.size(); ++i) {
            if (i) os << ',';
            serialize_value(os, ent.args[i]);
        }
        os << ");\n";
    }
    os << "ENDSEC;\nEND-ISO-10303-21;\n";
    return os.str();
}

bool value_equal(const Value& a, const Value& b) {
    if (a.base().index() != b.base().index()) return false;
    if (const auto* d = std::get_if<double>(&a.base())) return *d == std::get<double>(b.base());
    if (const auto* s = std::get_if<std::string>(&a.base()))
        return *s == std::get<std::string>(b.base());
    if (const auto* e = std::get_if<EnumValue>(&a.base()))
        return *e == std::get<EnumValue>(b.base());
    if (const auto* r = std::get_if<EntityRef>(&a.base()))
        return *r == std::get<EntityRef>(b.base());
    if (std::get_if<Unset>(&a.base()) || std::get_if<Derived>(&a.base())) return true;
    if (const auto* l = std::get_if<ValueList>(&a.base())) {
        const auto& lb = std::get<ValueList>(b.base());
        if (l->size() != lb.size()) return false;
        for (std::size_t i = 0; i < l->size(); ++i)
            if (!value_equal((*l)[i], lb[i])) return false;
        return true;
    }
    const auto& ta = std::get<std::shared_ptr<TypedValue>>(a.base());
    const auto& tb = std::get<std::shared_ptr<TypedValue>>(b.base());
    if (ta->keyword != tb->keyword || ta->args.size() != tb->args.size()) return false;
    for (std::size_t i = 0; i < ta->args.size(); ++i)
        if (!value_equal(ta->args[i], tb->args[i])) return false;
    return true;
}

bool models_equal(const StepModel& a, const StepModel& b) {
    if (a.entities.size() != b.entities.size() || a.header.size() != b.header.size()) return false;
    for (std::size_t i = 0; i < a.header.size(); ++i) {
        if (a.header[i].keyword != b.header[i].keyword) return false;
        if (a.header[i].args.size() != b.header[i].args.size()) return false;
        for (std::size_t j = 0; j < a.header[i].args.size(); ++j)
            if (!value_equal(a.header[i].args[j], b.header[i].args[j])) return false;
    }
    auto ita = a.entities.begin();
    auto itb = b.entities.begin();
    for (; ita != a.entities.end(); ++ita, ++itb) {
        if (ita->first != itb->first) return false;
        if (ita->second.keyword != itb->second.keyword) return false;
        if (ita->second.args.size() != itb->second.args.size()) return false;
        for (std::size_t j = 0; j < ita->second.args.size(); ++j)
            if (!value_equal(ita->second.args[j], itb->second.args[j])) return false;
    }
    return true;
}

}  // namespace sc::step
