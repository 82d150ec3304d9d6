//! Sentence tokenizer shared by every dataset importer.
//!
//! Rules: keep ASCII alphanumerics and `( ) , ! ? ' "`, everything else
//! becomes whitespace; lowercase unless asked not to; split the clitics
//! `'s 've n't 're 'd 'll` off their host word; the retained punctuation
//! marks become standalone tokens; whitespace collapses.

const CLITICS: [(&str, &str); 6] = [
    ("'s", " \u{1}s"),
    ("'ve", " \u{1}ve"),
    ("n't", " n\u{1}t"),
    ("'re", " \u{1}re"),
    ("'d", " \u{1}d"),
    ("'ll", " \u{1}ll"),
];

const MARKS: [(&str, &str); 7] = [
    (",", " , "),
    ("!", " ! "),
    ("(", " ( "),
    (")", " ) "),
    ("?", " ? "),
    ("'", " ' "),
    ("\"", " \" "),
];

pub fn tokenize(text: &str, preserve_case: bool) -> Vec<String> {
    let mut s = String::with_capacity(text.len() + 16);
    for ch in text.chars() {
        match ch {
            'A'..='Z' | 'a'..='z' | '0'..='9' | '(' | ')' | ',' | '!' | '?' | '\'' | '"' => {
                s.push(ch)
            }
            _ => s.push(' '),
        }
    }
    if !preserve_case {
        s.make_ascii_lowercase();
    }
    // Clitic apostrophes are protected with a placeholder so the standalone
    // quote split below cannot tear them apart.
    for (from, to) in CLITICS {
        if s.contains(from) {
            s = s.replace(from, to);
        }
    }
    for (from, to) in MARKS {
        if s.contains(from) {
            s = s.replace(from, to);
        }
    }
    if s.contains('\u{1}') {
        s = s.replace('\u{1}', "'");
    }
    s.split_whitespace().map(str::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<String> {
        tokenize(text, false)
    }

    #[test]
    fn splits_clitics_and_punctuation() {
        assert_eq!(toks("It's good!"), ["it", "'s", "good", "!"]);
        assert_eq!(toks("don't stop"), ["do", "n't", "stop"]);
        assert_eq!(toks("we've they're i'd you'll"), [
            "we", "'ve", "they", "'re", "i", "'d", "you", "'ll"
        ]);
    }

    #[test]
    fn empty_and_whitespace_only() {
        assert_eq!(toks(""), Vec::<String>::new());
        assert_eq!(toks("   \t\n "), Vec::<String>::new());
    }

    #[test]
    fn collapses_whitespace() {
        assert_eq!(toks("A  B"), ["a", "b"]);
    }

    #[test]
    fn quotes_and_brackets_are_standalone() {
        assert_eq!(toks("'hello' (world)?"), ["'", "hello", "'", "(", "world", ")", "?"]);
        assert_eq!(toks("she said \"go\""), ["she", "said", "\"", "go", "\""]);
    }

    #[test]
    fn strips_other_characters() {
        assert_eq!(toks("co-operate #tag :-)"), ["co", "operate", "tag"]);
        assert_eq!(toks("naïve café"), ["na", "ve", "caf"]);
    }

    #[test]
    fn preserve_case_keeps_letters() {
        assert_eq!(tokenize("What's UP?", true), ["What", "'s", "UP", "?"]);
    }

    #[test]
    fn idempotent_on_joined_output() {
        for text in [
            "It's a \"great\" movie, isn't it?",
            "they'll say we've done it (again)!",
            "plain words only",
        ] {
            let first = toks(text);
            let second = toks(&first.join(" "));
            assert_eq!(first, second, "not idempotent for {text:?}");
        }
    }
}
