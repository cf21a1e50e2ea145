//! Observation-time expressions such as `2*t_m`, `3/2 t_m_A` or
//! `t_m_A + t_m_B`, evaluated against a network's mirror times.

use crate::network::MirrorTimes;

/// Parses and evaluates `expr`. `t_m` and `t_m_A` name chain 0, `t_m_B`
/// chain 1, `t_m_C` chain 2; a bare number is an absolute time.
pub fn eval_time(expr: &str, times: &MirrorTimes) -> Result<f64, String> {
    let tokens = tokenize(expr)?;
    if tokens.is_empty() {
        return Err("empty time expression".into());
    }
    let mut total = 0.0;
    let mut sign = 1.0;
    let mut term: Vec<&Token> = Vec::new();
    let flush = |term: &mut Vec<&Token>, sign: f64, total: &mut f64| -> Result<(), String> {
        *total += sign * eval_term(term, times, expr)?;
        term.clear();
        Ok(())
    };
    for (k, tok) in tokens.iter().enumerate() {
        match tok {
            Token::Plus | Token::Minus if k > 0 => {
                flush(&mut term, sign, &mut total)?;
                sign = if *tok == Token::Minus { -1.0 } else { 1.0 };
            }
            Token::Minus => sign = -1.0,
            Token::Plus => {}
            _ => term.push(tok),
        }
    }
    flush(&mut term, sign, &mut total)?;
    if !total.is_finite() {
        return Err(format!("time expression `{expr}` is not finite"));
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Mirror(usize),
    Star,
    Slash,
    Plus,
    Minus,
}

fn tokenize(expr: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut rest = expr.trim();
    while !rest.is_empty() {
        let c = rest.chars().next().expect("nonempty");
        if c.is_whitespace() {
            rest = rest.trim_start();
            continue;
        }
        let single = match c {
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            _ => None,
        };
        if let Some(t) = single {
            out.push(t);
            rest = &rest[1..];
        } else if c.is_ascii_digit() || c == '.' {
            let end = rest
                .find(|ch: char| !(ch.is_ascii_digit() || ch == '.' || ch == 'e'))
                .unwrap_or(rest.len());
            let num: f64 = rest[..end]
                .parse()
                .map_err(|_| format!("bad number `{}` in `{expr}`", &rest[..end]))?;
            out.push(Token::Num(num));
            rest = &rest[end..];
        } else if rest.starts_with("t_m") {
            let end = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            let chain = match &rest[..end] {
                "t_m" | "t_m_A" => 0,
                "t_m_B" => 1,
                "t_m_C" => 2,
                other => return Err(format!("unknown time token `{other}`; use t_m, t_m_A, t_m_B or t_m_C")),
            };
            out.push(Token::Mirror(chain));
            rest = &rest[end..];
        } else {
            return Err(format!("unexpected `{c}` in time expression `{expr}`"));
        }
    }
    Ok(out)
}

// term := number [('/' number)] ['*'] [mirror] | mirror
fn eval_term(term: &[&Token], times: &MirrorTimes, expr: &str) -> Result<f64, String> {
    let bad = || format!("cannot read time expression `{expr}`");
    let mut value = 1.0;
    let mut k = 0;
    let mut saw_any = false;
    if let Some(Token::Num(x)) = term.first() {
        value = *x;
        k = 1;
        saw_any = true;
        if let (Some(Token::Slash), Some(Token::Num(d))) = (term.get(1), term.get(2)) {
            if *d == 0.0 {
                return Err(format!("division by zero in `{expr}`"));
            }
            value /= d;
            k = 3;
        }
    }
    if let Some(Token::Star) = term.get(k) {
        k += 1;
        if !matches!(term.get(k), Some(Token::Mirror(_))) {
            return Err(bad());
        }
    }
    if let Some(Token::Mirror(chain)) = term.get(k) {
        let t = times
            .get(*chain)
            .ok_or_else(|| format!("`{expr}` names chain {chain} but the network has {} chains", times.as_slice().len()))?;
        value *= t;
        k += 1;
        saw_any = true;
    }
    if k != term.len() || !saw_any {
        return Err(bad());
    }
    Ok(value)
}
