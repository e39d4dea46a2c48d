//! Built-in presentations, addressed by short names.
//!
//! | name            | group                                              |
//! |-----------------|----------------------------------------------------|
//! | `cyclic:m,k`    | `(C_m)^k`, `m` a power of an odd prime             |
//! | `elem:p,k`      | `(C_p)^k`                                          |
//! | `heisenberg:p`  | extraspecial `p^{1+2}` of exponent `p`             |
//! | `meta:p`        | `<a,b | a^{p^2}, b^p, [a,b]=a^p>`                  |
//! | `d:d,p`         | free rank-`d` class-2 exponent-`p` group           |
//! | `maxclass:p`    | `C_p wr C_p` truncated to order `p^4` (class 3)    |
//! | `maxclass5:3`   | a 3-group of maximal class of order 3^5            |
//!
//! Factors joined with `*` form a direct product, e.g. `heisenberg:3*cyclic:3,1`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::is_prime;
use crate::pc::{build_d, PcPresentation};

fn unit(n: usize, i: usize, e: u32) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = e;
    v
}

fn check_prime(p: u32) -> Result<()> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::InvalidPresentation(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Splits `m = p^e` for an odd prime `p`.
fn prime_power(m: u64) -> Result<(u32, usize)> {
    let bad = || Error::InvalidPresentation(format!("{m} is not a power of an odd prime"));
    if m < 3 {
        return Err(bad());
    }
    let p = (2..=m).find(|d| m % d == 0).ok_or_else(bad)?;
    let (mut r, mut e) = (m, 0);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    if r != 1 || p == 2 {
        return Err(bad());
    }
    Ok((p as u32, e))
}

pub fn cyclic(m: u64) -> Result<PcPresentation> {
    let (p, e) = prime_power(m)?;
    let powers = (0..e).map(|i| if i + 1 < e { unit(e, i + 1, 1) } else { vec![0; e] }).collect();
    PcPresentation::new(format!("cyclic:{m},1"), p, powers, BTreeMap::new())
}

pub fn elementary_abelian(p: u32, k: usize) -> Result<PcPresentation> {
    check_prime(p)?;
    if k == 0 {
        return Err(Error::InvalidPresentation("rank must be positive".into()));
    }
    PcPresentation::new(format!("elem:{p},{k}"), p, vec![vec![0; k]; k], BTreeMap::new())
}

pub fn heisenberg(p: u32) -> Result<PcPresentation> {
    check_prime(p)?;
    let mut comms = BTreeMap::new();
    comms.insert((1, 0), unit(3, 2, 1));
    PcPresentation::new(format!("heisenberg:{p}"), p, vec![vec![0; 3]; 3], comms)
}

/// The nonabelian group of order `p^3` and exponent `p^2`; generators `a, b, a^p`.
pub fn meta(p: u32) -> Result<PcPresentation> {
    check_prime(p)?;
    let mut comms = BTreeMap::new();
    // [b,a] = [a,b]^-1 = a^-p
    comms.insert((1, 0), unit(3, 2, p - 1));
    let powers = vec![unit(3, 2, 1), vec![0; 3], vec![0; 3]];
    PcPresentation::new(format!("meta:{p}"), p, powers, comms)
}

/// Order `p^4`, generators `a, b, c, d` with `[b,a]=c`, `[c,a]=d`.
pub fn maxclass(p: u32) -> Result<PcPresentation> {
    check_prime(p)?;
    let mut comms = BTreeMap::new();
    comms.insert((1, 0), unit(4, 2, 1));
    comms.insert((2, 0), unit(4, 3, 1));
    PcPresentation::new(format!("maxclass:{p}"), p, vec![vec![0; 4]; 4], comms)
}

/// A 3-group of maximal class and order `3^5` on generators `s, s1, s2, s3, s4`:
/// `[s_i, s] = s_{i+1}`, `[s2, s1] = s4^2`, `s1^3 = s3^2 s4`, `s2^3 = s4^2`.
/// Its Frattini subgroup contains its own centralizer.
pub fn maxclass5_3() -> Result<PcPresentation> {
    let p = 3;
    let mut comms = BTreeMap::new();
    // generators: 0 = s, 1 = s1, 2 = s2, 3 = s3, 4 = s4
    comms.insert((1, 0), unit(5, 2, 1));
    comms.insert((2, 0), unit(5, 3, 1));
    comms.insert((3, 0), unit(5, 4, 1));
    comms.insert((2, 1), unit(5, 4, 2));
    let powers = vec![vec![0; 5], vec![0, 0, 0, 2, 1], vec![0, 0, 0, 0, 2], vec![0; 5], vec![0; 5]];
    PcPresentation::new("maxclass5:3", p, powers, comms)
}

/// Direct product; generators of `a` come first.
pub fn direct_product(a: &PcPresentation, b: &PcPresentation) -> Result<PcPresentation> {
    if a.prime() != b.prime() {
        return Err(Error::InvalidPresentation("direct factors must share the prime".into()));
    }
    let (na, nb) = (a.rank(), b.rank());
    let n = na + nb;
    let left = |v: &[u32]| {
        let mut w = v.to_vec();
        w.resize(n, 0);
        w
    };
    let right = |v: &[u32]| {
        let mut w = vec![0; na];
        w.extend_from_slice(v);
        w
    };
    let mut powers: Vec<Vec<u32>> = (0..na).map(|i| left(a.power_rhs(i))).collect();
    powers.extend((0..nb).map(|i| right(b.power_rhs(i))));
    let mut comms = BTreeMap::new();
    for ((j, i), v) in a.nontrivial_commutators() {
        comms.insert((j, i), left(&v));
    }
    for ((j, i), v) in b.nontrivial_commutators() {
        comms.insert((j + na, i + na), right(&v));
    }
    PcPresentation::new(format!("{}*{}", a.name(), b.name()), a.prime(), powers, comms)
}

fn numbers(args: &str, count: usize, name: &str) -> Result<Vec<u64>> {
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    if parts.len() != count {
        return Err(Error::Parse(format!("`{name}` expects {count} numeric argument(s)")));
    }
    parts
        .iter()
        .map(|s| s.parse::<u64>().map_err(|_| Error::Parse(format!("bad number `{s}` in `{name}`"))))
        .collect()
}

fn small(x: u64) -> Result<u32> {
    u32::try_from(x).map_err(|_| Error::Parse(format!("{x} is too large")))
}

fn factor(spec: &str) -> Result<PcPresentation> {
    let (kind, args) = spec.split_once(':').ok_or_else(|| Error::Parse(format!("unknown group `{spec}`")))?;
    let pres = match kind.trim() {
        "cyclic" => {
            let v = numbers(args, 2, spec)?;
            if v[1] == 0 {
                return Err(Error::InvalidPresentation("need at least one factor".into()));
            }
            let c = cyclic(v[0])?;
            let mut acc = c.clone();
            for _ in 1..v[1] {
                acc = direct_product(&acc, &c)?;
            }
            acc
        }
        "elem" => {
            let v = numbers(args, 2, spec)?;
            elementary_abelian(small(v[0])?, v[1] as usize)?
        }
        "heisenberg" => heisenberg(small(numbers(args, 1, spec)?[0])?)?,
        "meta" => meta(small(numbers(args, 1, spec)?[0])?)?,
        "maxclass" => maxclass(small(numbers(args, 1, spec)?[0])?)?,
        "maxclass5" => {
            if numbers(args, 1, spec)?[0] != 3 {
                return Err(Error::Parse("maxclass5 is only available for p = 3".into()));
            }
            maxclass5_3()?
        }
        "d" => {
            let v = numbers(args, 2, spec)?;
            build_d(v[0] as usize, small(v[1])?)?
        }
        _ => return Err(Error::Parse(format!("unknown group `{spec}`"))),
    };
    Ok(pres.with_name(spec.trim()))
}

/// Builds a catalog group from its name.
pub fn parse(name: &str) -> Result<PcPresentation> {
    let mut parts = name.split('*');
    let mut acc = factor(parts.next().unwrap_or(""))?;
    for part in parts {
        acc = direct_product(&acc, &factor(part)?)?;
    }
    Ok(acc.with_name(name.trim()))
}

/// Catalog names for prime `p` with order at most `max_order`, in a fixed order.
pub fn names(p: u32, max_order: u128) -> Vec<String> {
    let mut out = vec![
        format!("cyclic:{p},1"),
        format!("elem:{p},2"),
        format!("cyclic:{},1", p * p),
        format!("elem:{p},3"),
        format!("cyclic:{},1*cyclic:{p},1", p * p),
        format!("cyclic:{},1", p * p * p),
        format!("heisenberg:{p}"),
        format!("meta:{p}"),
        format!("elem:{p},4"),
        format!("heisenberg:{p}*cyclic:{p},1"),
        format!("meta:{p}*cyclic:{p},1"),
        format!("maxclass:{p}"),
        format!("d:3,{p}"),
    ];
    if p == 3 {
        out.push("maxclass5:3".into());
        out.push("heisenberg:3*cyclic:9,1".into());
        out.push("meta:3*cyclic:9,1".into());
        out.push("heisenberg:3*elem:3,2".into());
        out.push("maxclass:3*cyclic:3,1".into());
    }
    out.retain(|name| parse(name).map(|g| g.order() <= max_order).unwrap_or(false));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    #[test]
    fn catalog_orders() {
        assert_eq!(parse("cyclic:3,1").unwrap().order(), 3);
        assert_eq!(parse("cyclic:9,1").unwrap().order(), 9);
        assert_eq!(parse("cyclic:3,2").unwrap().order(), 9);
        assert_eq!(parse("heisenberg:5").unwrap().order(), 125);
        assert_eq!(parse("d:2,3").unwrap().order(), 27);
        assert_eq!(parse("heisenberg:3*cyclic:3,1").unwrap().rank(), 4);
        assert!(parse("cyclic:6,1").is_err());
        assert!(parse("nope:3").is_err());
        assert!(parse("heisenberg:4").is_err());
    }

    #[test]
    fn catalog_is_consistent() {
        for p in [3, 5] {
            for name in names(p, 3u128.pow(6)) {
                let g = Group::from_presentation(parse(&name).unwrap()).unwrap();
                g.check_consistency(2000, 7).unwrap_or_else(|e| panic!("{name}: {e}"));
            }
        }
    }

    #[test]
    fn cyclic_nine_has_an_element_of_order_nine() {
        let g = Group::from_presentation(parse("cyclic:9,1").unwrap()).unwrap();
        assert_eq!(g.element_order(g.gen(0)), 9);
    }

    #[test]
    fn meta_has_exponent_nine() {
        let g = Group::from_presentation(meta(3).unwrap()).unwrap();
        assert!(!g.is_abelian());
        assert_eq!((0..27).map(|x| g.element_order(x)).max(), Some(9));
    }
}
