//! Monomial lists such as `x3,y1,y2`, `1,x^2,x7` or `x^3y^2,...`.

pub fn parse_monomials(text: &str) -> Result<[(usize, usize); 3], String> {
    let terms: Vec<&str> = text.split(',').map(str::trim).collect();
    if terms.len() != 3 {
        return Err(format!("expected 3 monomials, got {} in {text:?}", terms.len()));
    }
    let mut out = [(0, 0); 3];
    for (slot, term) in out.iter_mut().zip(terms) {
        *slot = parse_monomial(term)?;
    }
    Ok(out)
}

/// `1`, or a product of `x`/`y` powers with optional `^`.
pub fn parse_monomial(term: &str) -> Result<(usize, usize), String> {
    let t: String = term.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
    if t == "1" {
        return Ok((0, 0));
    }
    if t.is_empty() {
        return Err("empty monomial".into());
    }
    let (mut i, mut j) = (None, None);
    let mut chars = t.chars().peekable();
    while let Some(var) = chars.next() {
        if var != 'x' && var != 'y' {
            return Err(format!("unexpected {var:?} in monomial {term:?}"));
        }
        if chars.peek() == Some(&'^') {
            chars.next();
        }
        let mut digits = String::new();
        while let Some(&c) = chars.peek().filter(|c| c.is_ascii_digit()) {
            digits.push(c);
            chars.next();
        }
        let exp = if digits.is_empty() {
            1
        } else {
            digits
                .parse()
                .map_err(|_| format!("exponent too large in {term:?}"))?
        };
        let slot = if var == 'x' { &mut i } else { &mut j };
        if slot.replace(exp).is_some() {
            return Err(format!("{var} appears twice in monomial {term:?}"));
        }
    }
    Ok((i.unwrap_or(0), j.unwrap_or(0)))
}
