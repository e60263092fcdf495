//! Recursive-descent parser for `.gcr` rule documents.

use super::{CauseConstraint, CauseRule, Condition, PreconditionSet, RuleError, RuleSet};
use crate::model::{Comparator, Duration, EntityId, Quantity, Unit, Value};

pub fn parse_rules(text: &str) -> Result<RuleSet, RuleError> {
    let mut p = Parser::new(text);
    let mut preconditions = Vec::new();
    let mut cause_rules = Vec::new();
    loop {
        p.skip_trivia();
        if p.at_end() {
            break;
        }
        let pos = p.pos();
        match p.word("`precondition` or `rule`")?.as_str() {
            "precondition" => preconditions.push(p.precondition()?),
            "rule" => cause_rules.push(p.cause_rule()?),
            other => return Err(pos.error("`precondition` or `rule`", &format!("`{other}`"))),
        }
    }
    RuleSet::new(preconditions, cause_rules)
}

#[derive(Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn error(self, expected: &str, found: &str) -> RuleError {
        RuleError::Parse {
            line: self.line,
            column: self.column,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

struct Parser {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    column: usize,
}

fn is_word_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

impl Parser {
    fn new(src: &str) -> Self {
        Self {
            chars: src.chars().collect(),
            idx: 0,
            line: 1,
            column: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn at_end(&self) -> bool {
        self.idx >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn peek_at(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.idx + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(c) => format!("`{c}`"),
        }
    }

    fn word(&mut self, expected: &str) -> Result<String, RuleError> {
        self.skip_trivia();
        if !self.peek().is_some_and(is_word_start) {
            return Err(self.pos().error(expected, &self.found()));
        }
        let mut w = String::new();
        while let Some(c) = self.peek().filter(|c| is_word_char(*c)) {
            w.push(c);
            self.bump();
        }
        Ok(w)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), RuleError> {
        self.skip_trivia();
        let pos = self.pos();
        let expected = format!("`{kw}`");
        match self.word(&expected) {
            Ok(w) if w == kw => Ok(()),
            Ok(w) => Err(pos.error(&expected, &format!("`{w}`"))),
            Err(e) => Err(e),
        }
    }

    fn punct(&mut self, c: char) -> Result<(), RuleError> {
        self.skip_trivia();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.pos().error(&format!("`{c}`"), &self.found()))
        }
    }

    fn entity_id(&mut self, what: &str) -> Result<EntityId, RuleError> {
        self.skip_trivia();
        let pos = self.pos();
        let w = self.word(what)?;
        EntityId::new(w.as_str()).map_err(|_| pos.error(what, &format!("`{w}`")))
    }

    fn number(&mut self, expected: &str) -> Result<f64, RuleError> {
        self.skip_trivia();
        let pos = self.pos();
        let mut s = String::new();
        if let Some(c) = self.peek().filter(|c| matches!(c, '-' | '+')) {
            s.push(c);
            self.bump();
        }
        while let Some(c) = self.peek() {
            let exp_sign = matches!(c, '-' | '+') && s.ends_with(['e', 'E']);
            let exp = matches!(c, 'e' | 'E')
                && self
                    .peek_at(1)
                    .is_some_and(|n| n.is_ascii_digit() || n == '-' || n == '+');
            if c.is_ascii_digit() || c == '.' || exp || exp_sign {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| {
                pos.error(
                    expected,
                    &if s.is_empty() {
                        self.found()
                    } else {
                        format!("`{s}`")
                    },
                )
            })
    }

    fn comparator(&mut self) -> Result<Comparator, RuleError> {
        self.skip_trivia();
        let pos = self.pos();
        let first = self.peek();
        let two: String = [self.peek(), self.peek_at(1)].iter().flatten().collect();
        let (sym, len) = match (first, two.as_str()) {
            (_, "<=") | (_, ">=") | (_, "!=") | (_, "==") => (two.clone(), 2),
            (Some(c @ ('<' | '>' | '=' | '≤' | '≥' | '≠')), _) => (c.to_string(), 1),
            _ => {
                return Err(pos.error(
                    "comparator (<, <=, >, >=, =, !=) or `present`/`absent`",
                    &self.found(),
                ))
            }
        };
        for _ in 0..len {
            self.bump();
        }
        Ok(sym.parse().expect("lexed comparator symbols parse"))
    }

    fn condition(&mut self) -> Result<Condition, RuleError> {
        let attribute = self.word("attribute name")?;
        self.skip_trivia();
        let pos = self.pos();
        if self.peek().is_some_and(is_word_start) {
            let w = self.word("`present` or `absent`")?;
            let comparator = match w.as_str() {
                "present" => Comparator::Present,
                "absent" => Comparator::Absent,
                _ => return Err(pos.error("comparator or `present`/`absent`", &format!("`{w}`"))),
            };
            return Ok(Condition::new(attribute, comparator, None)?);
        }
        let comparator = self.comparator()?;
        self.skip_trivia();
        let pos = self.pos();
        let threshold = match self.peek() {
            Some(c) if c.is_ascii_digit() || matches!(c, '-' | '+' | '.') => {
                let magnitude = self.number("number")?;
                Value::Quantity(self.unit(magnitude)?)
            }
            Some(c) if is_word_start(c) => {
                let token = self.word("categorical token")?;
                if comparator.is_ordering() {
                    return Err(pos.error("number with unit", &format!("`{token}`")));
                }
                Value::Categorical(token)
            }
            _ => return Err(pos.error("number with unit or categorical token", &self.found())),
        };
        Ok(Condition::new(attribute, comparator, Some(threshold))?)
    }

    fn unit(&mut self, magnitude: f64) -> Result<Quantity, RuleError> {
        self.skip_trivia();
        let pos = self.pos();
        let mut sym = String::new();
        while let Some(c) = self
            .peek()
            .filter(|c| !c.is_whitespace() && !matches!(c, ';' | '{' | '}' | '#'))
        {
            sym.push(c);
            self.bump();
        }
        if sym.is_empty() {
            return Err(pos.error("unit symbol", &self.found()));
        }
        let unit = Unit::lookup(&sym).map_err(|_| RuleError::UnknownUnit {
            line: pos.line,
            column: pos.column,
            unit: sym.clone(),
        })?;
        Ok(Quantity::new(magnitude, unit)?)
    }

    fn precondition(&mut self) -> Result<PreconditionSet, RuleError> {
        let id = self.entity_id("precondition id")?;
        self.keyword("effects")?;
        let kind = self.word("event kind")?;
        self.punct('{')?;
        let mut conditions = Vec::new();
        loop {
            self.skip_trivia();
            if self.peek() == Some('}') {
                self.bump();
                break;
            }
            conditions.push(self.condition()?);
            self.skip_trivia();
            match self.peek() {
                Some(';') => {
                    self.bump();
                }
                Some('}') => {}
                _ => return Err(self.pos().error("`;` or `}`", &self.found())),
            }
        }
        PreconditionSet::new(id, kind, conditions)
    }

    fn cause_rule(&mut self) -> Result<CauseRule, RuleError> {
        let id = self.word("rule id")?;
        self.punct(':')?;
        let cause = self.word("cause event kind")?;
        self.keyword("causes")?;
        let effect = self.word("effect event kind")?;
        self.keyword("when")?;
        self.skip_trivia();
        let pos = self.pos();
        let constraint = match self.word("`co-occurs` or `precedes`")?.as_str() {
            "co-occurs" => CauseConstraint::CoOccurs,
            "precedes" => {
                if self.peek_word() == Some("within".into()) {
                    self.keyword("within")?;
                    CauseConstraint::PrecedesWithin(self.duration()?)
                } else {
                    CauseConstraint::Precedes
                }
            }
            other => return Err(pos.error("`co-occurs` or `precedes`", &format!("`{other}`"))),
        };
        CauseRule::new(id, cause, effect, constraint)
    }

    fn peek_word(&mut self) -> Option<String> {
        self.skip_trivia();
        let mut i = self.idx;
        let mut w = String::new();
        while let Some(c) = self.chars.get(i).filter(|c| is_word_char(**c)) {
            w.push(*c);
            i += 1;
        }
        (!w.is_empty()).then_some(w)
    }

    fn duration(&mut self) -> Result<Duration, RuleError> {
        self.skip_trivia();
        let pos = self.pos();
        let mut text = String::new();
        while let Some(c) = self
            .peek()
            .filter(|c| c.is_ascii_alphanumeric() || *c == '-')
        {
            text.push(c);
            self.bump();
        }
        text.parse::<Duration>()
            .map_err(|_| pos.error("duration like 24h, 90min, 2d", &format!("`{text}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PC_TC: &str = "precondition PC_TC effects TropicalCyclone { SeaSurfaceTemp > 82 degF; AtmosphericPressure > 1000 hPa; WindShear > 10 m/s; CoriolisForce present }";

    #[test]
    fn tropical_cyclone_precondition() {
        let rs = parse_rules(PC_TC).unwrap();
        assert_eq!(rs.preconditions().len(), 1);
        let pc = &rs.preconditions()[0];
        assert_eq!(pc.id().as_str(), "PC_TC");
        assert_eq!(pc.event_kind(), "TropicalCyclone");
        assert_eq!(pc.conditions().len(), 4);
        assert_eq!(pc.conditions()[3].comparator(), Comparator::Present);
        assert_eq!(
            pc.conditions()[2].threshold(),
            Some(&Value::Quantity(Quantity::of(10.0, "m/s").unwrap()))
        );
    }

    #[test]
    fn cause_rules() {
        let rs = parse_rules(
            "rule R1: HeavyRain causes FlashFlood when co-occurs\n\
             rule R2: TropicalStorm causes HeavyRain when precedes within 24h\n\
             rule R3: A causes A when precedes # self-succession is fine\n",
        )
        .unwrap();
        assert_eq!(rs.cause_rules().len(), 3);
        assert_eq!(rs.cause_rules()[0].constraint(), CauseConstraint::CoOccurs);
        assert_eq!(
            rs.cause_rules()[1].constraint(),
            CauseConstraint::PrecedesWithin(Duration::hours(24))
        );
        assert_eq!(rs.cause_rules()[2].constraint(), CauseConstraint::Precedes);
    }

    #[test]
    fn double_greater_is_error_at_second() {
        let err = parse_rules("precondition P effects X { Temp >> 3 K }").unwrap_err();
        let col = "precondition P effects X { Temp >".len() + 1;
        assert_eq!(
            err,
            RuleError::Parse {
                line: 1,
                column: col,
                expected: "number with unit or categorical token".into(),
                found: "`>`".into(),
            }
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_rules("precondition P effects X { Speed > 3 furlongs/fortnight }"),
            Err(RuleError::UnknownUnit { .. })
        ));
        assert!(matches!(
            parse_rules("rule R: A causes B when co-occurs\nrule R: B causes C when co-occurs"),
            Err(RuleError::DuplicateRuleId(_))
        ));
        assert!(matches!(
            parse_rules("rule P: A causes B when co-occurs\nprecondition P effects X { T > 1 K }"),
            Err(RuleError::DuplicateRuleId(_))
        ));
        assert!(matches!(
            parse_rules("rule R: A causes A when co-occurs"),
            Err(RuleError::Invalid { .. })
        ));
        assert!(matches!(
            parse_rules("precondition P effects X { }"),
            Err(RuleError::Invalid { .. })
        ));
        assert!(matches!(
            parse_rules("precondition P effects X { T > 1 K; T < 5 K }"),
            Err(RuleError::Invalid { .. })
        ));
        assert!(matches!(
            parse_rules("precondition P effects X { T > warm }"),
            Err(RuleError::Parse { .. })
        ));
        assert!(matches!(
            parse_rules("rule R: A causes B when precedes within soon"),
            Err(RuleError::Parse { .. })
        ));
        assert!(matches!(
            parse_rules("rule R: A causes B when precedes within -1h"),
            Err(RuleError::Invalid { .. })
        ));
        match parse_rules("# comment\n\nprecondition P effects X {\n  T > 1\n}") {
            Err(RuleError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn categorical_equality_and_unicode_comparators() {
        let rs =
            parse_rules("precondition P effects X { Phase = mature; T ≥ -5.5 degC; P ≠ 1 atm; }")
                .unwrap();
        let c = rs.preconditions()[0].conditions();
        assert_eq!(c[0].threshold(), Some(&Value::Categorical("mature".into())));
        assert_eq!(c[1].comparator(), Comparator::Ge);
        assert_eq!(c[2].comparator(), Comparator::Ne);
    }
}
