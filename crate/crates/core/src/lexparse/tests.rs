use super::*;
use proptest::prelude::*;

fn texts(src: &str) -> Vec<String> {
    tokenize(src).unwrap().into_iter().map(|t| t.text).collect()
}

fn cc(src: &str) -> u32 {
    cyclomatic(&parse_source(src).unwrap())
}

#[test]
fn tokenize_collapses_literals() {
    assert_eq!(
        texts("int f(){return 1;}"),
        ["int", "f", "(", ")", "{", "return", "LIT", ";", "}"]
    );
}

#[test]
fn tokenize_empty_source() {
    assert_eq!(texts(""), Vec::<String>::new());
}

#[test]
fn tokenize_drops_comments() {
    assert_eq!(texts("/*c*/ x"), ["x"]);
    assert_eq!(texts("x // trailing\ny"), ["x", "y"]);
}

#[test]
fn tokenize_string_contents_dropped() {
    assert_eq!(texts("f(\"if (a && b)\")"), ["f", "(", "LIT", ")"]);
}

#[test]
fn tokenize_unterminated_string_reports_position() {
    let err = tokenize("int f(){\n  g(\"abc);\n}").unwrap_err();
    assert_eq!(err, LexError::UnterminatedString { line: 2, col: 5 });
}

#[test]
fn tokenize_unterminated_comment_reports_position() {
    let err = tokenize("x /* never closed").unwrap_err();
    assert_eq!(err, LexError::UnterminatedComment { line: 1, col: 3 });
}

#[test]
fn tokenize_positions_non_decreasing() {
    let toks = tokenize("int a;\nint b = 2;\n").unwrap();
    let positions: Vec<(u32, u32)> = toks.iter().map(|t| (t.line, t.col)).collect();
    let mut sorted = positions.clone();
    sorted.sort();
    assert_eq!(positions, sorted);
}

#[test]
fn parse_if_call_chain() {
    let tree = parse_source("void f(){if(a){b();}}").unwrap();
    assert_eq!(tree.kind, NodeKind::Method);
    let block = &tree.children[0];
    assert_eq!(block.kind, NodeKind::Block);
    let if_node = &block.children[0];
    assert_eq!(if_node.kind, NodeKind::If);
    let then = if_node
        .children
        .iter()
        .find(|c| c.kind == NodeKind::Block)
        .expect("then block");
    assert_eq!(then.children[0].kind, NodeKind::Call);
    assert_eq!(then.children[0].text.as_deref(), Some("b"));
}

#[test]
fn parse_straight_line_has_no_control_nodes() {
    let tree = parse_source("int f(int x){int y = x; g(y); return y;}").unwrap();
    let mut kinds = Vec::new();
    tree.walk(&mut |n| kinds.push(n.kind));
    assert_eq!(tree.children[0].children.len(), 3);
    for kind in kinds {
        assert!(
            !matches!(
                kind,
                NodeKind::If | NodeKind::While | NodeKind::For | NodeKind::Switch
            ),
            "unexpected control node {kind:?}"
        );
    }
}

#[test]
fn parse_condition_builds_cond_and() {
    let tree = parse_source("void f(){if(a&&b)c();}").unwrap();
    let if_node = &tree.children[0].children[0];
    assert_eq!(if_node.kind, NodeKind::If);
    assert_eq!(if_node.children[0].kind, NodeKind::CondAnd);
}

#[test]
fn parse_unbalanced_reports_position() {
    let toks = tokenize("void f(){ if (a {}").unwrap();
    assert!(matches!(
        parse_method(&toks),
        Err(ParseError::Unbalanced { .. })
    ));
}

#[test]
fn parse_case_only_under_switch() {
    let tree =
        parse_source("void f(int x){switch(x){case 1: a(); break; default: b();}}").unwrap();
    let mut ok = true;
    fn visit(node: &SyntaxTree, under_switch: bool, ok: &mut bool) {
        if matches!(node.kind, NodeKind::Case | NodeKind::Default) && !under_switch {
            *ok = false;
        }
        for c in &node.children {
            visit(c, node.kind == NodeKind::Switch, ok);
        }
    }
    visit(&tree, false, &mut ok);
    assert!(ok);
}

#[test]
fn cyclomatic_straight_line_is_one() {
    assert_eq!(cc("int f(){return 1;}"), 1);
    assert_eq!(cc("void g(){}"), 1);
}

#[test]
fn cyclomatic_if_with_and_is_three() {
    assert_eq!(cc("void f(){if(a&&b)c();}"), 3);
}

#[test]
fn cyclomatic_counts_boolean_operators_per_occurrence() {
    assert_eq!(cc("void f(){if(a&&b&&c)d();}"), 4);
    assert_eq!(cc("void f(){if(a||b&&c)d();}"), 4);
    assert_eq!(cc("void f(){if(!(a&&b))d();}"), 3);
}

#[test]
fn cyclomatic_switch_counts_cases_and_default() {
    let src = "void f(int x){switch(x){case 1: a(); break; case 2: b(); break; default: c();}}";
    assert_eq!(cc(src), 4);
}

#[test]
fn cyclomatic_loops_and_ternary() {
    assert_eq!(cc("void f(){for(int i=0;i<n;i++){g(i);}}"), 2);
    assert_eq!(cc("void f(){while(a){b();}}"), 2);
    assert_eq!(cc("void f(){do{b();}while(a);}"), 2);
    assert_eq!(cc("int f(){int x = a ? 1 : 2; return x;}"), 2);
}

#[test]
fn cyclomatic_catch_flag() {
    let src = "void f(){try{a();}catch(Exception e){b();}finally{c();}}";
    let tree = parse_source(src).unwrap();
    assert_eq!(cyclomatic(&tree), 2);
    let strict = CyclomaticOptions { count_catch: false };
    assert_eq!(cyclomatic_with(&tree, strict), 1);
}

#[test]
fn cyclomatic_else_does_not_count() {
    assert_eq!(cc("void f(){if(a){b();}else{c();}}"), 2);
    assert_eq!(cc("void f(){if(a){b();}else if(c){d();}else{e();}}"), 3);
}

#[test]
fn pretty_print_parse_fixpoint_preserves_complexity() {
    let sources = [
        "int f(){return 1;}",
        "void f(){if(a&&b)c(); else d();}",
        "void f(int x){switch(x){case 1: a(); break; default: b();}}",
        "void f(){for(int i=0;i<n&&ok;i++){if(g(i))h();}}",
        "void f(){try{a();}catch(E e){b();}}",
    ];
    for src in sources {
        let toks = tokenize(src).unwrap();
        let direct = cyclomatic(&parse_method(&toks).unwrap());
        let reprinted = pretty(&toks);
        let again = cyclomatic(&parse_source(&reprinted).unwrap());
        assert_eq!(direct, again, "fixpoint broken for {src:?}");
    }
}

// Random-but-balanced token streams for the no-panic fuzz property.
fn balanced_token_stream() -> impl Strategy<Value = Vec<Token>> {
    let pool = prop::sample::select(vec![
        "if", "else", "while", "for", "do", "switch", "case", "default", "try", "catch",
        "finally", "return", "int", "void", "x", "y", "foo", "LIT", "&&", "||", "=", "+", "?",
        ":", ";", ",", ".", "!", "<", ">", "(", ")", "{", "}", "[", "]",
    ]);
    prop::collection::vec(pool, 0..80).prop_map(|texts| {
        let mut out = Vec::new();
        let mut stack: Vec<&str> = Vec::new();
        for text in texts {
            match text {
                "(" => stack.push(")"),
                "[" => stack.push("]"),
                "{" => stack.push("}"),
                ")" | "]" | "}" => {
                    if stack.last() != Some(&text) {
                        continue;
                    }
                    stack.pop();
                }
                _ => {}
            }
            out.push(text);
        }
        while let Some(close) = stack.pop() {
            out.push(close);
        }
        let joined = out.join(" ");
        tokenize(&joined).unwrap()
    })
}

proptest! {
    #[test]
    fn parse_never_panics_on_balanced_streams(tokens in balanced_token_stream()) {
        // Either result is acceptable; the property is absence of panics.
        let _ = parse_method(&tokens);
    }

    #[test]
    fn cyclomatic_at_least_one(tokens in balanced_token_stream()) {
        if let Ok(tree) = parse_method(&tokens) {
            prop_assert!(cyclomatic(&tree) >= 1);
        }
    }
}
