#include "istar/parser.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace istar {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class TokKind {
    Ident,    // bare word: keywords and local ids
    String,   // quoted name
    LBrace,
    RBrace,
    Semi,
    Comma,
    Dot,
    ArrowRight,  // ->
    ArrowLeft,   // <-
    End,
    Bad,
};

struct Token {
    TokKind kind = TokKind::End;
    std::string text;  // unescaped for String, literal for Ident
    SourceSpan span;
};

class Lexer {
public:
    Lexer(const std::string& source, std::string file,
          std::vector<Diagnostic>& diags)
        : src_(source), file_(std::move(file)), diags_(diags) {
        if (src_.size() >= 3 && (unsigned char)src_[0] == 0xEF &&
            (unsigned char)src_[1] == 0xBB && (unsigned char)src_[2] == 0xBF) {
            pos_ = 3;
            Diagnostic d;
            d.code = "P005";
            d.severity = Severity::Warning;
            d.message = "byte-order mark skipped";
            d.primary.span = span(1, 1, 1, 1);
            diags_.push_back(d);
        }
    }

    Token next() {
        skip_trivia();
        int sl = line_, sc = col_;
        if (pos_ >= src_.size()) return tok(TokKind::End, "", sl, sc);
        char c = src_[pos_];
        if (c == '{') return single(TokKind::LBrace, sl, sc);
        if (c == '}') return single(TokKind::RBrace, sl, sc);
        if (c == ';') return single(TokKind::Semi, sl, sc);
        if (c == ',') return single(TokKind::Comma, sl, sc);
        if (c == '.') return single(TokKind::Dot, sl, sc);
        if (c == '-' && peek(1) == '>') {
            advance();
            advance();
            return tok(TokKind::ArrowRight, "->", sl, sc);
        }
        if (c == '<' && peek(1) == '-') {
            advance();
            advance();
            return tok(TokKind::ArrowLeft, "<-", sl, sc);
        }
        if (c == '"') return lex_string(sl, sc);
        if (is_word_start(c)) return lex_ident(sl, sc);
        advance();
        Token bad = tok(TokKind::Bad, std::string(1, c), sl, sc);
        error(bad.span, std::string("unexpected character '") + c + "'");
        return bad;
    }

    void error(const SourceSpan& at, std::string message) {
        Diagnostic d;
        d.code = "P001";
        d.severity = Severity::Error;
        d.message = std::move(message);
        d.primary.span = at;
        diags_.push_back(d);
    }

private:
    static bool is_word_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool is_word(char c) {
        return is_word_start(c) || (c >= '0' && c <= '9');
    }

    char peek(std::size_t off = 0) const {
        return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
    }

    void advance() {
        if (pos_ >= src_.size()) return;
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_trivia() {
        for (;;) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (peek() != '\n' && pos_ < src_.size()) advance();
            } else {
                return;
            }
        }
    }

    SourceSpan span(int sl, int sc, int el, int ec) const {
        return {file_, sl, sc, el, ec};
    }

    Token tok(TokKind kind, std::string text, int sl, int sc) const {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.span = span(sl, sc, line_, col_ > 1 ? col_ - 1 : col_);
        return t;
    }

    Token single(TokKind kind, int sl, int sc) {
        std::string text(1, src_[pos_]);
        advance();
        return tok(kind, text, sl, sc);
    }

    Token lex_ident(int sl, int sc) {
        std::string text;
        while (is_word(peek())) {
            text += peek();
            advance();
        }
        return tok(TokKind::Ident, text, sl, sc);
    }

    Token lex_string(int sl, int sc) {
        advance();  // opening quote
        std::string text;
        for (;;) {
            char c = peek();
            if (pos_ >= src_.size() || c == '\n') {
                Token t = tok(TokKind::Bad, text, sl, sc);
                error(t.span, "unterminated quote");
                return t;
            }
            if (c == '"') {
                advance();
                return tok(TokKind::String, text, sl, sc);
            }
            if (c == '\\') {
                advance();
                char esc = peek();
                switch (esc) {
                    case '"': text += '"'; break;
                    case '\\': text += '\\'; break;
                    case 'n': text += '\n'; break;
                    case 't': text += '\t'; break;
                    case 'r': text += '\r'; break;
                    default: {
                        Token t = tok(TokKind::Bad, text, sl, sc);
                        error(span(line_, col_, line_, col_),
                              std::string("unknown escape '\\") + esc + "'");
                        advance();
                        continue;
                    }
                }
                advance();
            } else {
                text += c;
                advance();
            }
        }
    }

    const std::string& src_;
    std::string file_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

// ---------------------------------------------------------------------------
// Statement AST (resolution is a second pass so declarations may appear in
// any order)
// ---------------------------------------------------------------------------

struct Ref {
    bool isLocalId = false;  // true: bare local id; false: quoted name
    std::string text;
    SourceSpan span;
};

struct ElementDecl {
    ElementKind kind = ElementKind::Goal;
    std::string name;
    std::optional<std::string> localId;
    SourceSpan span;
};

struct RefineStmt {
    RefinementOperator op = RefinementOperator::And;
    Ref parent;
    std::vector<Ref> children;
    SourceSpan span;
};

struct ContributeStmt {
    ContributionLevel level = ContributionLevel::Help;
    Ref source, target;
    SourceSpan span;
};

struct NeedsStmt {
    Ref task, resource;
    SourceSpan span;
};

struct QualifyStmt {
    Ref quality, subject;
    SourceSpan span;
};

using BoundaryLink =
    std::variant<RefineStmt, ContributeStmt, NeedsStmt, QualifyStmt>;

struct ActorDecl {
    ActorKind kind = ActorKind::GenericActor;
    std::string name;
    SourceSpan span;
    std::vector<ElementDecl> elements;
    std::vector<BoundaryLink> links;
};

struct ActorLinkStmt {
    ActorLinkKind kind = ActorLinkKind::IsA;
    Ref source, target;
    SourceSpan span;
};

struct ActorElmtRef {
    Ref actor;
    std::optional<Ref> elmt;
};

struct DependStmt {
    ActorElmtRef depender;
    ElementKind dependumKind = ElementKind::Goal;
    std::string dependumName;
    SourceSpan dependumSpan;
    ActorElmtRef dependee;
    SourceSpan span;
};

struct TopStmt {
    std::size_t actorIndex = SIZE_MAX;  // into actors, when an actor decl
    std::optional<ActorLinkStmt> link;
    std::optional<DependStmt> depend;
};

struct Ast {
    std::vector<ActorDecl> actors;
    std::vector<TopStmt> order;  // file order of top-level statements
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    Parser(const std::string& source, const std::string& file,
           std::vector<Diagnostic>& diags)
        : lexer_(source, file, diags), diags_(diags) {
        bump();
    }

    Ast parse_file() {
        Ast ast;
        while (cur_.kind != TokKind::End) {
            std::size_t before = diags_.size();
            if (at_keyword("actor") || at_keyword("agent") ||
                at_keyword("role")) {
                if (auto decl = parse_actor()) {
                    ast.actors.push_back(std::move(*decl));
                    TopStmt stmt;
                    stmt.actorIndex = ast.actors.size() - 1;
                    ast.order.push_back(stmt);
                }
            } else if (at_keyword("link")) {
                if (auto link = parse_actor_link()) {
                    TopStmt stmt;
                    stmt.link = std::move(*link);
                    ast.order.push_back(stmt);
                }
            } else if (at_keyword("depend")) {
                if (auto dep = parse_depend()) {
                    TopStmt stmt;
                    stmt.depend = std::move(*dep);
                    ast.order.push_back(stmt);
                }
            } else if (cur_.kind == TokKind::Semi) {
                bump();
            } else {
                syntax_error("expected 'actor', 'agent', 'role', 'link' or "
                             "'depend'");
            }
            if (diags_.size() > before) recover_top();
        }
        return ast;
    }

private:
    void bump() {
        prev_end_ = cur_.span;
        cur_ = lexer_.next();
    }

    bool at_keyword(const char* kw) const {
        return cur_.kind == TokKind::Ident && cur_.text == kw;
    }

    void syntax_error(const std::string& what) {
        std::string got = cur_.kind == TokKind::End
                              ? "end of file"
                              : "'" + cur_.text + "'";
        lexer_.error(cur_.span, what + ", got " + got);
    }

    bool expect_arrow_right() {
        if (cur_.kind != TokKind::ArrowRight) {
            syntax_error("expected '->'");
            return false;
        }
        bump();
        return true;
    }

    bool expect_arrow_left() {
        if (cur_.kind != TokKind::ArrowLeft) {
            syntax_error("expected '<-'");
            return false;
        }
        bump();
        return true;
    }

    std::optional<std::string> expect_string(const char* what) {
        if (cur_.kind != TokKind::String) {
            syntax_error(std::string("expected ") + what);
            return std::nullopt;
        }
        std::string text = cur_.text;
        bump();
        return text;
    }

    // quoted name or bare local id
    std::optional<Ref> parse_ref() {
        if (cur_.kind == TokKind::String || cur_.kind == TokKind::Ident) {
            Ref ref{cur_.kind == TokKind::Ident, cur_.text, cur_.span};
            bump();
            return ref;
        }
        syntax_error("expected a name or local id");
        return std::nullopt;
    }

    // Skips to the next plausible top-level statement start.
    void recover_top() {
        int depth = 0;
        while (cur_.kind != TokKind::End) {
            if (depth == 0 &&
                (at_keyword("actor") || at_keyword("agent") ||
                 at_keyword("role") || at_keyword("link") ||
                 at_keyword("depend")))
                return;
            if (cur_.kind == TokKind::LBrace) ++depth;
            if (cur_.kind == TokKind::RBrace && depth > 0) --depth;
            bump();
        }
    }

    // Skips to the next boundary statement or the closing brace.
    void recover_boundary() {
        while (cur_.kind != TokKind::End && cur_.kind != TokKind::RBrace) {
            if (at_boundary_start()) return;
            bump();
        }
    }

    bool at_boundary_start() const {
        return at_keyword("goal") || at_keyword("quality") ||
               at_keyword("task") || at_keyword("resource") ||
               at_keyword("refine") || at_keyword("contribute") ||
               at_keyword("needs") || at_keyword("qualify");
    }

    std::optional<ActorDecl> parse_actor() {
        ActorDecl decl;
        decl.kind = cur_.text == "agent"  ? ActorKind::Agent
                    : cur_.text == "role" ? ActorKind::Role
                                          : ActorKind::GenericActor;
        SourceSpan start = cur_.span;
        bump();
        auto name = expect_string("an actor name in quotes");
        if (!name) return std::nullopt;
        decl.name = *name;
        decl.span = start;
        decl.span.endLine = prev_end_.endLine;
        decl.span.endCol = prev_end_.endCol;
        if (cur_.kind != TokKind::LBrace) {
            syntax_error("expected '{'");
            return std::nullopt;
        }
        bump();
        while (cur_.kind != TokKind::RBrace) {
            if (cur_.kind == TokKind::End) {
                syntax_error("expected '}' before end of file");
                return decl;  // keep what we have; error already recorded
            }
            std::size_t before = diags_.size();
            parse_boundary_stmt(decl);
            if (diags_.size() > before)
                recover_boundary();
        }
        bump();  // '}'
        return decl;
    }

    void parse_boundary_stmt(ActorDecl& decl) {
        if (cur_.kind == TokKind::Semi) {
            bump();
            return;
        }
        if (at_keyword("goal") || at_keyword("quality") || at_keyword("task") ||
            at_keyword("resource")) {
            parse_element(decl);
        } else if (at_keyword("refine")) {
            parse_refine(decl);
        } else if (at_keyword("contribute")) {
            parse_contribute(decl);
        } else if (at_keyword("needs")) {
            parse_needs(decl);
        } else if (at_keyword("qualify")) {
            parse_qualify(decl);
        } else {
            syntax_error("expected an element or link statement");
        }
    }

    void parse_element(ActorDecl& decl) {
        ElementDecl elem;
        elem.kind = cur_.text == "goal"      ? ElementKind::Goal
                    : cur_.text == "quality" ? ElementKind::Quality
                    : cur_.text == "task"    ? ElementKind::Task
                                             : ElementKind::Resource;
        SourceSpan start = cur_.span;
        bump();
        auto name = expect_string("an element name in quotes");
        if (!name) return;
        elem.name = *name;
        if (at_keyword("as")) {
            bump();
            if (cur_.kind != TokKind::Ident) {
                syntax_error("expected a local id after 'as'");
                return;
            }
            elem.localId = cur_.text;
            bump();
        }
        elem.span = start;
        elem.span.endLine = prev_end_.endLine;
        elem.span.endCol = prev_end_.endCol;
        decl.elements.push_back(std::move(elem));
    }

    void parse_refine(ActorDecl& decl) {
        RefineStmt stmt;
        SourceSpan start = cur_.span;
        bump();
        if (at_keyword("and")) {
            stmt.op = RefinementOperator::And;
        } else if (at_keyword("or")) {
            stmt.op = RefinementOperator::Or;
        } else {
            syntax_error("expected 'and' or 'or'");
            return;
        }
        bump();
        auto parent = parse_ref();
        if (!parent) return;
        stmt.parent = *parent;
        if (!expect_arrow_left()) return;
        for (;;) {
            auto child = parse_ref();
            if (!child) return;
            stmt.children.push_back(*child);
            if (cur_.kind != TokKind::Comma) break;
            bump();
        }
        stmt.span = make_span(start);
        decl.links.push_back(std::move(stmt));
    }

    void parse_contribute(ActorDecl& decl) {
        ContributeStmt stmt;
        SourceSpan start = cur_.span;
        bump();
        if (at_keyword("make")) stmt.level = ContributionLevel::Make;
        else if (at_keyword("help")) stmt.level = ContributionLevel::Help;
        else if (at_keyword("hurt")) stmt.level = ContributionLevel::Hurt;
        else if (at_keyword("break")) stmt.level = ContributionLevel::Break;
        else {
            syntax_error("expected 'make', 'help', 'hurt' or 'break'");
            return;
        }
        bump();
        auto src = parse_ref();
        if (!src) return;
        stmt.source = *src;
        if (!expect_arrow_right()) return;
        auto dst = parse_ref();
        if (!dst) return;
        stmt.target = *dst;
        stmt.span = make_span(start);
        decl.links.push_back(std::move(stmt));
    }

    void parse_needs(ActorDecl& decl) {
        NeedsStmt stmt;
        SourceSpan start = cur_.span;
        bump();
        auto task = parse_ref();
        if (!task) return;
        stmt.task = *task;
        if (!expect_arrow_left()) return;
        auto resource = parse_ref();
        if (!resource) return;
        stmt.resource = *resource;
        stmt.span = make_span(start);
        decl.links.push_back(std::move(stmt));
    }

    void parse_qualify(ActorDecl& decl) {
        QualifyStmt stmt;
        SourceSpan start = cur_.span;
        bump();
        auto quality = parse_ref();
        if (!quality) return;
        stmt.quality = *quality;
        if (!expect_arrow_right()) return;
        auto subject = parse_ref();
        if (!subject) return;
        stmt.subject = *subject;
        stmt.span = make_span(start);
        decl.links.push_back(std::move(stmt));
    }

    std::optional<ActorLinkStmt> parse_actor_link() {
        ActorLinkStmt stmt;
        SourceSpan start = cur_.span;
        bump();  // 'link'
        if (at_keyword("isa")) {
            stmt.kind = ActorLinkKind::IsA;
        } else if (at_keyword("participates")) {
            stmt.kind = ActorLinkKind::ParticipatesIn;
        } else {
            syntax_error("expected 'isa' or 'participates'");
            return std::nullopt;
        }
        bump();
        auto src = expect_string("an actor name in quotes");
        if (!src) return std::nullopt;
        stmt.source = {false, *src, prev_end_};
        if (!expect_arrow_right()) return std::nullopt;
        auto dst = expect_string("an actor name in quotes");
        if (!dst) return std::nullopt;
        stmt.target = {false, *dst, prev_end_};
        stmt.span = make_span(start);
        return stmt;
    }

    std::optional<ActorElmtRef> parse_actor_elmt_ref() {
        ActorElmtRef ref;
        auto actor = expect_string("an actor name in quotes");
        if (!actor) return std::nullopt;
        ref.actor = {false, *actor, prev_end_};
        if (cur_.kind == TokKind::Dot) {
            bump();
            auto elmt = parse_ref();
            if (!elmt) return std::nullopt;
            ref.elmt = *elmt;
        }
        return ref;
    }

    std::optional<DependStmt> parse_depend() {
        DependStmt stmt;
        SourceSpan start = cur_.span;
        bump();  // 'depend'
        auto depender = parse_actor_elmt_ref();
        if (!depender) return std::nullopt;
        stmt.depender = *depender;
        if (!expect_arrow_right()) return std::nullopt;
        if (at_keyword("goal")) stmt.dependumKind = ElementKind::Goal;
        else if (at_keyword("quality")) stmt.dependumKind = ElementKind::Quality;
        else if (at_keyword("task")) stmt.dependumKind = ElementKind::Task;
        else if (at_keyword("resource"))
            stmt.dependumKind = ElementKind::Resource;
        else {
            syntax_error("expected a dependum kind "
                         "(goal, quality, task or resource)");
            return std::nullopt;
        }
        bump();
        SourceSpan nameStart = cur_.span;
        auto name = expect_string("a dependum name in quotes");
        if (!name) return std::nullopt;
        stmt.dependumName = *name;
        stmt.dependumSpan = nameStart;
        stmt.dependumSpan.endLine = prev_end_.endLine;
        stmt.dependumSpan.endCol = prev_end_.endCol;
        if (!expect_arrow_right()) return std::nullopt;
        auto dependee = parse_actor_elmt_ref();
        if (!dependee) return std::nullopt;
        stmt.dependee = *dependee;
        stmt.span = make_span(start);
        return stmt;
    }

    SourceSpan make_span(const SourceSpan& start) const {
        SourceSpan s = start;
        s.endLine = prev_end_.endLine;
        s.endCol = prev_end_.endCol;
        return s;
    }

    Lexer lexer_;
    std::vector<Diagnostic>& diags_;
    Token cur_;
    SourceSpan prev_end_;  // span of the most recently consumed token
};

}  // namespace

namespace {

// ---------------------------------------------------------------------------
// Resolution: AST -> Model
// ---------------------------------------------------------------------------

struct BoundaryScope {
    std::map<std::string, std::vector<ElementId>> byName;
    std::map<std::string, ElementId> byLocalId;
};

void report(std::vector<Diagnostic>& diags, std::string code,
            const SourceSpan& span, std::string message) {
    Diagnostic d;
    d.code = std::move(code);
    d.severity = Severity::Error;
    d.message = std::move(message);
    d.primary.span = span;
    diags.push_back(d);
}

std::optional<ElementId> resolve_element(const BoundaryScope& scope,
                                         const Ref& ref,
                                         std::vector<Diagnostic>& diags) {
    if (ref.isLocalId) {
        auto it = scope.byLocalId.find(ref.text);
        if (it == scope.byLocalId.end()) {
            report(diags, "P002", ref.span,
                   "unresolved local id '" + ref.text + "'");
            return std::nullopt;
        }
        return it->second;
    }
    auto it = scope.byName.find(ref.text);
    if (it == scope.byName.end() || it->second.empty()) {
        report(diags, "P002", ref.span,
               "unresolved element name \"" + ref.text + "\"");
        return std::nullopt;
    }
    if (it->second.size() > 1) {
        report(diags, "P003", ref.span,
               "ambiguous element name \"" + ref.text +
                   "\"; declare a local id with 'as' and refer to it");
        return std::nullopt;
    }
    return it->second.front();
}

std::optional<ActorId> resolve_actor(const Model& model, const Ref& ref,
                                     std::vector<Diagnostic>& diags) {
    std::vector<ActorId> hits;
    for (const Actor& actor : model.actors)
        if (actor.name == ref.text) hits.push_back(actor.id);
    if (hits.empty()) {
        report(diags, "P002", ref.span,
               "unresolved actor name \"" + ref.text + "\"");
        return std::nullopt;
    }
    if (hits.size() > 1) {
        report(diags, "P003", ref.span,
               "ambiguous actor name \"" + ref.text + "\"");
        return std::nullopt;
    }
    return hits.front();
}

void surface_model_error(const ModelError& error, const SourceSpan& span,
                         std::vector<Diagnostic>& diags) {
    report(diags, diagnostic_code_for(error.code), span, error.message);
}

}  // namespace

ParseOutcome parse(const std::string& source, const std::string& fileName) {
    ParseOutcome outcome;
    Parser parser(source, fileName, outcome.diagnostics);
    Ast ast = parser.parse_file();

    Model model;
    std::vector<ActorId> actorIds(ast.actors.size());
    std::vector<BoundaryScope> scopes(ast.actors.size());

    // Phase 1: declare all actors and their elements so links can refer
    // forwards and backwards alike.
    for (std::size_t i = 0; i < ast.actors.size(); ++i) {
        const ActorDecl& decl = ast.actors[i];
        auto actor = add_actor(model, decl.name, decl.kind);
        if (!actor) {
            surface_model_error(actor.error(), decl.span, outcome.diagnostics);
            continue;
        }
        actorIds[i] = *actor;
        model.sourceMap[(*actor).value] = decl.span;
        for (const ElementDecl& elem : decl.elements) {
            auto id = add_element(model, *actor, elem.name, elem.kind);
            if (!id) {
                surface_model_error(id.error(), elem.span,
                                    outcome.diagnostics);
                continue;
            }
            model.sourceMap[(*id).value] = elem.span;
            scopes[i].byName[elem.name].push_back(*id);
            if (elem.localId) {
                auto [it, fresh] = scopes[i].byLocalId.emplace(*elem.localId,
                                                              *id);
                if (!fresh)
                    report(outcome.diagnostics, "P004", elem.span,
                           "local id '" + *elem.localId +
                               "' is already declared in this boundary");
            }
        }
    }

    // Phase 2: boundary links, per actor in declaration order.
    for (std::size_t i = 0; i < ast.actors.size(); ++i) {
        const BoundaryScope& scope = scopes[i];
        for (const BoundaryLink& link : ast.actors[i].links) {
            if (const RefineStmt* r = std::get_if<RefineStmt>(&link)) {
                auto parent = resolve_element(scope, r->parent,
                                              outcome.diagnostics);
                if (!parent) continue;
                std::vector<ElementId> children;
                bool ok = true;
                for (const Ref& childRef : r->children) {
                    auto child = resolve_element(scope, childRef,
                                                 outcome.diagnostics);
                    if (!child) {
                        ok = false;
                        break;
                    }
                    children.push_back(*child);
                }
                if (!ok) continue;
                auto id = add_refinement(model, *parent, children, r->op);
                if (!id)
                    surface_model_error(id.error(), r->span,
                                        outcome.diagnostics);
                else
                    model.sourceMap[(*id).value] = r->span;
            } else if (const ContributeStmt* c =
                           std::get_if<ContributeStmt>(&link)) {
                auto src = resolve_element(scope, c->source,
                                           outcome.diagnostics);
                auto dst = resolve_element(scope, c->target,
                                           outcome.diagnostics);
                if (!src || !dst) continue;
                auto id = add_element_link(model,
                                           Contribution{*src, *dst, c->level});
                if (!id)
                    surface_model_error(id.error(), c->span,
                                        outcome.diagnostics);
                else
                    model.sourceMap[(*id).value] = c->span;
            } else if (const NeedsStmt* n = std::get_if<NeedsStmt>(&link)) {
                auto task = resolve_element(scope, n->task,
                                            outcome.diagnostics);
                auto resource = resolve_element(scope, n->resource,
                                                outcome.diagnostics);
                if (!task || !resource) continue;
                auto id = add_element_link(model, NeededBy{*resource, *task});
                if (!id)
                    surface_model_error(id.error(), n->span,
                                        outcome.diagnostics);
                else
                    model.sourceMap[(*id).value] = n->span;
            } else if (const QualifyStmt* q =
                           std::get_if<QualifyStmt>(&link)) {
                auto quality = resolve_element(scope, q->quality,
                                               outcome.diagnostics);
                auto subject = resolve_element(scope, q->subject,
                                               outcome.diagnostics);
                if (!quality || !subject) continue;
                auto id = add_element_link(model,
                                           Qualification{*quality, *subject});
                if (!id)
                    surface_model_error(id.error(), q->span,
                                        outcome.diagnostics);
                else
                    model.sourceMap[(*id).value] = q->span;
            }
        }
    }

    // Phase 3: top-level links and dependencies in file order.
    auto scope_of = [&](ActorId actor) -> const BoundaryScope* {
        for (std::size_t i = 0; i < actorIds.size(); ++i)
            if (actorIds[i] == actor) return &scopes[i];
        return nullptr;
    };

    for (const TopStmt& stmt : ast.order) {
        if (stmt.link) {
            auto src = resolve_actor(model, stmt.link->source,
                                     outcome.diagnostics);
            auto dst = resolve_actor(model, stmt.link->target,
                                     outcome.diagnostics);
            if (!src || !dst) continue;
            auto id = add_actor_link(model, *src, *dst, stmt.link->kind);
            if (!id)
                surface_model_error(id.error(), stmt.link->span,
                                    outcome.diagnostics);
            else
                model.sourceMap[(*id).value] = stmt.link->span;
        } else if (stmt.depend) {
            const DependStmt& dep = *stmt.depend;
            auto depender = resolve_actor(model, dep.depender.actor,
                                          outcome.diagnostics);
            auto dependee = resolve_actor(model, dep.dependee.actor,
                                          outcome.diagnostics);
            if (!depender || !dependee) continue;
            std::optional<ElementId> dependerElmt, dependeeElmt;
            bool ok = true;
            if (dep.depender.elmt) {
                const BoundaryScope* scope = scope_of(*depender);
                auto id = scope ? resolve_element(*scope, *dep.depender.elmt,
                                                  outcome.diagnostics)
                                : std::nullopt;
                if (!id) ok = false;
                dependerElmt = id;
            }
            if (dep.dependee.elmt) {
                const BoundaryScope* scope = scope_of(*dependee);
                auto id = scope ? resolve_element(*scope, *dep.dependee.elmt,
                                                  outcome.diagnostics)
                                : std::nullopt;
                if (!id) ok = false;
                dependeeElmt = id;
            }
            if (!ok) continue;
            auto id = add_dependency(model, *depender, dependerElmt,
                                     dep.dependumName, dep.dependumKind,
                                     *dependee, dependeeElmt);
            if (!id) {
                surface_model_error(id.error(), dep.span, outcome.diagnostics);
                continue;
            }
            model.sourceMap[(*id).value] = dep.span;
            const Dependency* record = model.find(*id);
            model.sourceMap[record->dependum.value] = dep.dependumSpan;
        }
    }

    bool hasErrors = std::any_of(
        outcome.diagnostics.begin(), outcome.diagnostics.end(),
        [](const Diagnostic& d) { return d.severity == Severity::Error; });
    sort_diagnostics(outcome.diagnostics);
    if (!hasErrors) outcome.model = std::move(model);
    return outcome;
}

// ---------------------------------------------------------------------------
// Formatter
// ---------------------------------------------------------------------------

namespace {

std::string quoted(const std::string& name) {
    std::string out = "\"";
    for (char c : name) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

// Elements whose name is not unique in their boundary get a generated
// `as e<k>` local id so references stay unambiguous when reparsed.
std::map<std::uint32_t, std::string> assign_local_ids(const Model& model) {
    std::map<std::uint32_t, std::string> localIds;
    for (const Actor& actor : model.actors) {
        std::map<std::string, int> nameCount;
        for (const IntentionalElement& elem : model.elements) {
            const ActorId* owner = std::get_if<ActorId>(&elem.owner);
            if (owner && *owner == actor.id) ++nameCount[elem.name];
        }
        int counter = 0;
        for (const IntentionalElement& elem : model.elements) {
            const ActorId* owner = std::get_if<ActorId>(&elem.owner);
            if (owner && *owner == actor.id && nameCount[elem.name] > 1)
                localIds[elem.id.value] = "e" + std::to_string(++counter);
        }
    }
    return localIds;
}

}  // namespace

std::string format(const Model& model) {
    std::map<std::uint32_t, std::string> localIds = assign_local_ids(model);

    auto element_ref = [&](ElementId id) -> std::string {
        auto it = localIds.find(id.value);
        if (it != localIds.end()) return it->second;
        const IntentionalElement* elem = model.find(id);
        return quoted(elem ? elem->name : "?");
    };

    std::ostringstream out;
    bool firstBlock = true;

    for (const Actor& actor : model.actors) {
        std::ostringstream body;
        for (const IntentionalElement& elem : model.elements) {
            const ActorId* owner = std::get_if<ActorId>(&elem.owner);
            if (!owner || *owner != actor.id) continue;
            body << "  " << to_string(elem.kind) << ' ' << quoted(elem.name);
            auto it = localIds.find(elem.id.value);
            if (it != localIds.end()) body << " as " << it->second;
            body << '\n';
        }
        auto in_boundary = [&](ElementId id) {
            const IntentionalElement* elem = model.find(id);
            if (!elem) return false;
            const ActorId* owner = std::get_if<ActorId>(&elem->owner);
            return owner && *owner == actor.id;
        };
        for (const Refinement& refinement : model.refinements) {
            if (!in_boundary(refinement.parent)) continue;
            body << "  refine "
                 << (refinement.op == RefinementOperator::And ? "and" : "or")
                 << ' ' << element_ref(refinement.parent) << " <- ";
            for (std::size_t i = 0; i < refinement.children.size(); ++i) {
                if (i) body << ", ";
                body << element_ref(refinement.children[i]);
            }
            body << '\n';
        }
        for (const ElementLink& link : model.elementLinks) {
            if (const Contribution* c = std::get_if<Contribution>(
                    &link.variant)) {
                if (!in_boundary(c->source)) continue;
                body << "  contribute " << to_string(c->level) << ' '
                     << element_ref(c->source) << " -> "
                     << element_ref(c->target) << '\n';
            } else if (const NeededBy* n = std::get_if<NeededBy>(
                           &link.variant)) {
                if (!in_boundary(n->task)) continue;
                body << "  needs " << element_ref(n->task) << " <- "
                     << element_ref(n->resource) << '\n';
            } else if (const Qualification* q = std::get_if<Qualification>(
                           &link.variant)) {
                if (!in_boundary(q->quality)) continue;
                body << "  qualify " << element_ref(q->quality) << " -> "
                     << element_ref(q->subject) << '\n';
            }
        }
        if (!firstBlock) out << '\n';
        firstBlock = false;
        std::string contents = body.str();
        out << to_string(actor.kind) << ' ' << quoted(actor.name);
        if (contents.empty())
            out << " {}\n";
        else
            out << " {\n" << contents << "}\n";
    }

    auto actor_name = [&](ActorId id) -> std::string {
        const Actor* actor = model.find(id);
        return quoted(actor ? actor->name : "?");
    };

    if (!model.actorLinks.empty()) {
        if (!firstBlock) out << '\n';
        firstBlock = false;
        for (const ActorLink& link : model.actorLinks)
            out << "link " << to_string(link.kind) << ' '
                << actor_name(link.source) << " -> " << actor_name(link.target)
                << '\n';
    }

    if (!model.dependencies.empty()) {
        if (!firstBlock) out << '\n';
        for (const Dependency& dep : model.dependencies) {
            const IntentionalElement* dependum = model.find(dep.dependum);
            out << "depend " << actor_name(dep.depender);
            if (dep.dependerElmt) {
                std::string ref = element_ref(*dep.dependerElmt);
                out << '.' << ref;
            }
            out << " -> " << to_string(dependum ? dependum->kind
                                                : ElementKind::Goal)
                << ' ' << quoted(dependum ? dependum->name : "?") << " -> "
                << actor_name(dep.dependee);
            if (dep.dependeeElmt) {
                std::string ref = element_ref(*dep.dependeeElmt);
                out << '.' << ref;
            }
            out << '\n';
        }
    }

    return out.str();
}

}  // namespace istar
