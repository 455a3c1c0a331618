//! Line-oriented text formats for instances, identity assignments, oracle
//! bounds, certificate vectors, node maps, and path-pattern language files.
//!
//! All formats share the same lexical conventions: the file is a sequence of
//! lines, blank lines are ignored, and lines whose first non-space character
//! is `#` are comments.  Parse failures report the 1-based line number of the
//! offending line.
//!
//! # Instance files
//!
//! ```text
//! # header: node count and edge count
//! n m
//! # m edge lines with 0-based endpoints
//! u v
//! ...
//! # n input lines; the hex payload may be omitted for the empty input
//! input 3132
//! input
//! ...
//! # optionally, n identity lines with distinct positive integers
//! id 7
//! ...
//! ```
//!
//! Structural defects (self-loops, duplicate edges, endpoints out of range,
//! disconnected graphs, zero or repeated identities) are rejected with typed
//! errors after the lines have been read.
//!
//! # Identity, bound, map, and certificate files
//!
//! Identity files carry one positive integer per line (a leading `id` tag is
//! tolerated so an instance file's tail can be reused verbatim).  Oracle
//! bound files carry one positive integer per line.  Map files carry one
//! 0-based target node index per line, in source node order.  Certificate
//! files carry one hex-encoded certificate per line, in node order; the hex
//! must be well-formed, but the certificate payload itself is deliberately
//! not validated here — a structurally broken certificate is a reason for a
//! verifier to vote no, not a reason to refuse the file.
//!
//! # Path-pattern files
//!
//! ```text
//! alphabet 61,62
//! window 61
//! window 61,62
//! window 62,61,62
//! ```
//!
//! The first content line declares the input alphabet as comma-separated
//! hex-encoded symbols; each following `window` line allows one window of one
//! to three symbols.  The token `-` denotes the empty symbol.  Membership and
//! window-set validation are delegated to
//! [`crate::languages::path_pattern_language`].

use std::fmt::Write as _;

use crate::error::Error;
use crate::graph::{Graph, IdentityAssignment, Instance};
use crate::languages::{path_pattern_language, Language};

/// Yields `(1-based line number, trimmed content)` for every line that is
/// neither blank nor a `#` comment.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

/// Pulls the next content line, or fails with an end-of-file diagnostic
/// positioned one past the last line of the file.
fn next_line<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    line_count: usize,
    expected: &str,
) -> Result<(usize, &'a str), Error> {
    lines.next().ok_or_else(|| {
        Error::parse(
            line_count + 1,
            format!("unexpected end of file: expected {expected}"),
        )
    })
}

fn parse_usize(line: usize, token: &str, what: &str) -> Result<usize, Error> {
    token
        .parse::<usize>()
        .map_err(|_| Error::parse(line, format!("{what} must be a non-negative integer, got `{token}`")))
}

fn parse_positive_u64(line: usize, token: &str, what: &str) -> Result<u64, Error> {
    let value = token
        .parse::<u64>()
        .map_err(|_| Error::parse(line, format!("{what} must be a positive integer, got `{token}`")))?;
    if value == 0 {
        return Err(Error::parse(line, format!("{what} must be positive")));
    }
    Ok(value)
}

fn parse_hex(line: usize, token: &str, what: &str) -> Result<Vec<u8>, Error> {
    hex::decode(token).map_err(|_| Error::parse(line, format!("{what} is not valid hex: `{token}`")))
}

/// Parses an instance file, returning the instance and the optional identity
/// assignment carried by trailing `id` lines.
pub fn parse_instance(text: &str) -> Result<(Instance, Option<IdentityAssignment>), Error> {
    let line_count = text.lines().count();
    let mut lines = content_lines(text);

    let (header_line, header) = next_line(&mut lines, line_count, "header `n m`")?;
    let mut tokens = header.split_whitespace();
    let (Some(n_tok), Some(m_tok), None) = (tokens.next(), tokens.next(), tokens.next()) else {
        return Err(Error::parse(
            header_line,
            format!("header must be `n m`, got `{header}`"),
        ));
    };
    let n = parse_usize(header_line, n_tok, "node count")?;
    let m = parse_usize(header_line, m_tok, "edge count")?;

    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, body) = next_line(&mut lines, line_count, "an edge line `u v`")?;
        let mut tokens = body.split_whitespace();
        let (Some(u_tok), Some(v_tok), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::parse(
                line,
                format!("edge line must be `u v`, got `{body}`"),
            ));
        };
        let u = parse_usize(line, u_tok, "edge endpoint")?;
        let v = parse_usize(line, v_tok, "edge endpoint")?;
        edges.push((u, v));
    }

    let mut inputs = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, body) = next_line(&mut lines, line_count, "an `input <hex>` line")?;
        let mut tokens = body.split_whitespace();
        if tokens.next() != Some("input") {
            return Err(Error::parse(
                line,
                format!("expected `input <hex>`, got `{body}`"),
            ));
        }
        let payload = match (tokens.next(), tokens.next()) {
            (None, _) => Vec::new(),
            (Some(tok), None) => parse_hex(line, tok, "input payload")?,
            (Some(_), Some(extra)) => {
                return Err(Error::parse(
                    line,
                    format!("unexpected token `{extra}` after input payload"),
                ));
            }
        };
        inputs.push(payload);
    }

    let rest: Vec<(usize, &str)> = lines.collect();
    let ids = if rest.is_empty() {
        None
    } else {
        let mut ids = Vec::with_capacity(n);
        for (offset, &(line, body)) in rest.iter().enumerate() {
            if offset >= n {
                return Err(Error::parse(
                    line,
                    format!("unexpected trailing line `{body}`"),
                ));
            }
            let mut tokens = body.split_whitespace();
            let (Some(tag), Some(id_tok), None) = (tokens.next(), tokens.next(), tokens.next())
            else {
                return Err(Error::parse(
                    line,
                    format!("expected `id <positive integer>`, got `{body}`"),
                ));
            };
            if tag != "id" {
                return Err(Error::parse(
                    line,
                    format!("expected `id <positive integer>`, got `{body}`"),
                ));
            }
            ids.push(parse_positive_u64(line, id_tok, "identity")?);
        }
        if ids.len() != n {
            return Err(Error::IdentityLength {
                got: ids.len(),
                expect: n,
            });
        }
        Some(IdentityAssignment::new(ids)?)
    };

    let graph = Graph::new(n, &edges)?;
    let instance = Instance::new(graph, inputs)?;
    Ok((instance, ids))
}

/// Renders an instance (and optionally an identity assignment) in the format
/// accepted by [`parse_instance`].
pub fn format_instance(instance: &Instance, ids: Option<&IdentityAssignment>) -> String {
    let graph = instance.graph();
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", graph.node_count(), graph.edge_count());
    for &(u, v) in graph.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    for input in instance.inputs() {
        if input.is_empty() {
            out.push_str("input\n");
        } else {
            let _ = writeln!(out, "input {}", hex::encode(input));
        }
    }
    if let Some(ids) = ids {
        for id in ids.ids() {
            let _ = writeln!(out, "id {id}");
        }
    }
    out
}

/// Parses an identity file: one distinct positive integer per line, in node
/// order, each optionally tagged with a leading `id`.
pub fn parse_ids(text: &str, node_count: usize) -> Result<IdentityAssignment, Error> {
    let mut ids = Vec::new();
    for (line, body) in content_lines(text) {
        let mut tokens = body.split_whitespace();
        let first = tokens.next().expect("content lines are nonempty");
        let (id_tok, extra) = if first == "id" {
            (
                tokens.next().ok_or_else(|| {
                    Error::parse(line, "expected `id <positive integer>`".to_string())
                })?,
                tokens.next(),
            )
        } else {
            (first, tokens.next())
        };
        if let Some(extra) = extra {
            return Err(Error::parse(
                line,
                format!("unexpected token `{extra}` after identity"),
            ));
        }
        ids.push(parse_positive_u64(line, id_tok, "identity")?);
    }
    if ids.len() != node_count {
        return Err(Error::IdentityLength {
            got: ids.len(),
            expect: node_count,
        });
    }
    IdentityAssignment::new(ids)
}

/// Parses an oracle bound file: one positive integer per line, in node order.
pub fn parse_bounds(text: &str, node_count: usize) -> Result<Vec<u64>, Error> {
    let mut bounds = Vec::new();
    for (line, body) in content_lines(text) {
        if body.split_whitespace().nth(1).is_some() {
            return Err(Error::parse(
                line,
                format!("expected one bound per line, got `{body}`"),
            ));
        }
        bounds.push(parse_positive_u64(line, body, "oracle bound")?);
    }
    if bounds.len() != node_count {
        return Err(Error::OracleLength {
            got: bounds.len(),
            expect: node_count,
        });
    }
    Ok(bounds)
}

/// Parses a certificate file: one hex-encoded certificate per line, in node
/// order.  Only the hex encoding is validated; whether the bytes form a
/// well-formed certificate is the verifier's question.
pub fn parse_certificates(text: &str, node_count: usize) -> Result<Vec<Vec<u8>>, Error> {
    let mut certs = Vec::new();
    for (line, body) in content_lines(text) {
        if body.split_whitespace().nth(1).is_some() {
            return Err(Error::parse(
                line,
                format!("expected one certificate per line, got `{body}`"),
            ));
        }
        certs.push(parse_hex(line, body, "certificate")?);
    }
    if certs.len() != node_count {
        return Err(Error::CertificateLength {
            got: certs.len(),
            expect: node_count,
        });
    }
    Ok(certs)
}

/// Renders certificates as lowercase hex, one line per node; the inverse of
/// [`parse_certificates`].
pub fn format_certificates(certs: &[Vec<u8>]) -> String {
    let mut out = String::new();
    for cert in certs {
        let _ = writeln!(out, "{}", hex::encode(cert));
    }
    out
}

/// Parses a node map file: one 0-based target node index per line, in source
/// node order.  Length and range checks belong to the map constructor, which
/// knows both endpoint instances.
pub fn parse_map(text: &str) -> Result<Vec<usize>, Error> {
    let mut map = Vec::new();
    for (line, body) in content_lines(text) {
        if body.split_whitespace().nth(1).is_some() {
            return Err(Error::parse(
                line,
                format!("expected one node index per line, got `{body}`"),
            ));
        }
        map.push(parse_usize(line, body, "node index")?);
    }
    Ok(map)
}

/// Parses one comma-separated list of hex symbols; `-` denotes the empty
/// symbol.
fn parse_symbol_list(line: usize, list: &str) -> Result<Vec<Vec<u8>>, Error> {
    list.split(',')
        .map(|token| {
            let token = token.trim();
            if token == "-" {
                Ok(Vec::new())
            } else if token.is_empty() {
                Err(Error::parse(line, "empty symbol in list (use `-` for the empty symbol)"))
            } else {
                parse_hex(line, token, "symbol")
            }
        })
        .collect()
}

/// Parses a free-standing comma-separated symbol list (hex tokens, `-` for
/// the empty symbol) as used for command-line alphabets.
pub fn parse_symbol_csv(list: &str) -> Result<Vec<Vec<u8>>, Error> {
    parse_symbol_list(0, list).map_err(|err| match err {
        Error::Parse { msg, .. } => Error::LanguageParameter(msg),
        other => other,
    })
}

/// Parses a path-pattern language file (see the module docs for the format).
pub fn parse_path_pattern(text: &str) -> Result<Language, Error> {
    let line_count = text.lines().count();
    let mut lines = content_lines(text);

    let (alpha_line, body) = next_line(&mut lines, line_count, "an `alphabet <symbols>` line")?;
    let alphabet = match body.split_once(char::is_whitespace) {
        Some(("alphabet", list)) => parse_symbol_list(alpha_line, list.trim())?,
        _ => {
            return Err(Error::parse(
                alpha_line,
                format!("first content line must be `alphabet <symbols>`, got `{body}`"),
            ));
        }
    };

    let mut windows = Vec::new();
    for (line, body) in lines {
        match body.split_once(char::is_whitespace) {
            Some(("window", list)) => windows.push(parse_symbol_list(line, list.trim())?),
            _ => {
                return Err(Error::parse(
                    line,
                    format!("expected `window <symbols>`, got `{body}`"),
                ));
            }
        }
    }

    path_pattern_language(alphabet, windows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn triangle_text() -> &'static str {
        "# a properly colored triangle\n\
         3 3\n\
         0 1\n\
         1 2\n\
         \n\
         0 2\n\
         input 31\n\
         input 32\n\
         input 33\n"
    }

    #[test]
    fn parses_instance_with_comments_and_blanks() {
        let (instance, ids) = parse_instance(triangle_text()).unwrap();
        assert_eq!(instance.node_count(), 3);
        assert_eq!(instance.graph().edge_count(), 3);
        assert_eq!(instance.input(0), b"1");
        assert_eq!(instance.input(2), b"3");
        assert!(ids.is_none());
    }

    #[test]
    fn parses_trailing_identities() {
        let text = "2 1\n0 1\ninput\ninput 6162\nid 9\nid 4\n";
        let (instance, ids) = parse_instance(text).unwrap();
        assert_eq!(instance.input(0), b"");
        assert_eq!(instance.input(1), b"ab");
        assert_eq!(ids.unwrap().ids(), &[9, 4]);
    }

    #[test]
    fn roundtrips_through_format() {
        let graph = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let instance = Instance::new(
            graph,
            vec![b"a".to_vec(), Vec::new(), b"xyz".to_vec(), vec![0x00, 0xff]],
        )
        .unwrap();
        let ids = IdentityAssignment::new(vec![5, 1, 9, 2]).unwrap();

        let text = format_instance(&instance, Some(&ids));
        let (back, back_ids) = parse_instance(&text).unwrap();
        assert_eq!(back, instance);
        assert_eq!(back_ids.unwrap().ids(), ids.ids());

        let text = format_instance(&instance, None);
        let (back, back_ids) = parse_instance(&text).unwrap();
        assert_eq!(back, instance);
        assert!(back_ids.is_none());
    }

    #[test]
    fn reports_offending_line_numbers() {
        let cases: &[(&str, usize, &str)] = &[
            ("x y\n", 1, "node count"),
            ("# lead\n2 one\n", 2, "edge count"),
            ("2 1\n0\ninput\ninput\n", 2, "edge line"),
            ("2 1\n0 1\ninputs\ninput\n", 3, "expected `input"),
            ("2 1\n0 1\ninput 3\ninput\n", 3, "not valid hex"),
            ("2 1\n0 1\ninput 31 32\ninput\n", 3, "unexpected token"),
            ("2 1\n0 1\ninput\ninput\nid 1\nid 2\nid 3\n", 7, "trailing"),
            ("2 1\n0 1\ninput\ninput\nid 0\nid 2\n", 5, "positive"),
            ("2 1\n0 1\ninput\ninput\nident 1\nid 2\n", 5, "expected `id"),
        ];
        for &(text, line, needle) in cases {
            match parse_instance(text) {
                Err(Error::Parse { line: got, msg }) => {
                    assert_eq!(got, line, "wrong line for {text:?}: {msg}");
                    assert!(msg.contains(needle), "message {msg:?} lacks {needle:?}");
                }
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn reports_truncation_past_the_last_line() {
        let err = parse_instance("3 2\n0 1\n1 2\ninput\ninput\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 6);
                assert!(msg.contains("unexpected end of file"), "{msg}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn structural_defects_are_typed_errors() {
        let disconnected = "2 0\ninput\ninput\n";
        assert!(matches!(
            parse_instance(disconnected),
            Err(Error::Disconnected)
        ));

        let self_loop = "2 2\n0 1\n1 1\ninput\ninput\n";
        assert!(matches!(parse_instance(self_loop), Err(Error::SelfLoop(1))));

        let duplicate = "2 2\n0 1\n1 0\ninput\ninput\n";
        assert!(matches!(
            parse_instance(duplicate),
            Err(Error::DuplicateEdge(0, 1))
        ));

        let out_of_range = "2 1\n0 2\ninput\ninput\n";
        assert!(matches!(
            parse_instance(out_of_range),
            Err(Error::NodeOutOfRange {
                node: 2,
                node_count: 2
            })
        ));

        let duplicate_ids = "2 1\n0 1\ninput\ninput\nid 3\nid 3\n";
        assert!(matches!(
            parse_instance(duplicate_ids),
            Err(Error::DuplicateIdentity)
        ));
    }

    #[test]
    fn parses_identity_files_in_both_shapes() {
        let bare = parse_ids("3\n1\n2\n", 3).unwrap();
        assert_eq!(bare.ids(), &[3, 1, 2]);

        let tagged = parse_ids("# reused instance tail\nid 3\nid 1\nid 2\n", 3).unwrap();
        assert_eq!(tagged.ids(), &[3, 1, 2]);

        assert!(matches!(
            parse_ids("1\n2\n", 3),
            Err(Error::IdentityLength { got: 2, expect: 3 })
        ));
        assert!(matches!(parse_ids("1\n1\n", 2), Err(Error::DuplicateIdentity)));
        match parse_ids("1\ntwo\n", 2) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn parses_bound_files() {
        assert_eq!(parse_bounds("4\n5\n4\n", 3).unwrap(), vec![4, 5, 4]);
        assert!(matches!(
            parse_bounds("4\n", 2),
            Err(Error::OracleLength { got: 1, expect: 2 })
        ));
        match parse_bounds("4\n0\n", 2) {
            Err(Error::Parse { line: 2, msg }) => assert!(msg.contains("positive"), "{msg}"),
            other => panic!("unexpected result {other:?}"),
        }
        match parse_bounds("4 4\n", 1) {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn certificate_files_roundtrip() {
        let certs = vec![vec![0x00, 0xab], vec![0xff]];
        let text = format_certificates(&certs);
        assert_eq!(text, "00ab\nff\n");
        assert_eq!(parse_certificates(&text, 2).unwrap(), certs);

        assert!(matches!(
            parse_certificates("00\n", 2),
            Err(Error::CertificateLength { got: 1, expect: 2 })
        ));
        match parse_certificates("00\nzz\n", 2) {
            Err(Error::Parse { line: 2, msg }) => assert!(msg.contains("hex"), "{msg}"),
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn parses_map_files() {
        assert_eq!(parse_map("0\n1\n0\n1\n").unwrap(), vec![0, 1, 0, 1]);
        match parse_map("0\n-1\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected result {other:?}"),
        }
        match parse_map("0 1\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn parses_symbol_csv_lists() {
        assert_eq!(
            parse_symbol_csv("61,62").unwrap(),
            vec![b"a".to_vec(), b"b".to_vec()]
        );
        assert_eq!(parse_symbol_csv("-").unwrap(), vec![Vec::<u8>::new()]);
        assert!(matches!(
            parse_symbol_csv("6z"),
            Err(Error::LanguageParameter(_))
        ));
        assert!(matches!(
            parse_symbol_csv("61,,62"),
            Err(Error::LanguageParameter(_))
        ));
    }

    #[test]
    fn parses_path_pattern_files() {
        let text = "# alternating two-symbol pattern\n\
                    alphabet 61,62\n\
                    window 61\n\
                    window 62\n\
                    window 61,62\n\
                    window 62,61\n\
                    window 61,62,61\n\
                    window 62,61,62\n";
        let lang = parse_path_pattern(text).unwrap();

        let path3 = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let member = Instance::new(
            path3.clone(),
            vec![b"a".to_vec(), b"b".to_vec(), b"a".to_vec()],
        )
        .unwrap();
        assert!(lang.is_member(&member));
        let repeat = Instance::new(
            path3,
            vec![b"a".to_vec(), b"a".to_vec(), b"b".to_vec()],
        )
        .unwrap();
        assert!(!lang.is_member(&repeat));
    }

    #[test]
    fn empty_symbol_token_denotes_empty_input() {
        let lang = parse_path_pattern("alphabet -\nwindow -\nwindow -,-\nwindow -,-,-\n").unwrap();
        let path2 = Graph::new(2, &[(0, 1)]).unwrap();
        assert!(lang.is_member(&Instance::uniform(path2.clone(), b"")));
        assert!(!lang.is_member(&Instance::uniform(path2, b"a")));
    }

    #[test]
    fn pattern_file_defects_are_diagnosed() {
        match parse_path_pattern("window 61\n") {
            Err(Error::Parse { line: 1, msg }) => assert!(msg.contains("alphabet"), "{msg}"),
            other => panic!("unexpected result {other:?}"),
        }
        match parse_path_pattern("alphabet 61\nwindows 61\n") {
            Err(Error::Parse { line: 2, msg }) => assert!(msg.contains("window"), "{msg}"),
            other => panic!("unexpected result {other:?}"),
        }
        match parse_path_pattern("alphabet 61,,62\n") {
            Err(Error::Parse { line: 1, msg }) => assert!(msg.contains("empty symbol"), "{msg}"),
            other => panic!("unexpected result {other:?}"),
        }
        match parse_path_pattern("alphabet 6z\n") {
            Err(Error::Parse { line: 1, msg }) => assert!(msg.contains("hex"), "{msg}"),
            other => panic!("unexpected result {other:?}"),
        }
        assert!(matches!(
            parse_path_pattern("alphabet 61\nwindow 62\n"),
            Err(Error::LanguageParameter(_))
        ));
        assert!(matches!(
            parse_path_pattern("alphabet 61\nwindow 61,61,61,61\n"),
            Err(Error::LanguageParameter(_))
        ));
        match parse_path_pattern("") {
            Err(Error::Parse { line: 1, msg }) => {
                assert!(msg.contains("unexpected end of file"), "{msg}")
            }
            other => panic!("unexpected result {other:?}"),
        }
    }
}
