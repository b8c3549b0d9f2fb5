//! Built-in families of multiplicative functions: the Möbius and Liouville
//! functions scaled by 1/n, the alternating-sign family (-1)^(n-1) n^(-alpha),
//! the g_k family (1-k on multiples of k, 1 elsewhere, scaled by n^(-alpha)),
//! and non-principal Dirichlet characters over n^alpha.

use crate::error::{Error, Result};
use crate::multiplicative::{FirstPowerForm, MultiplicativeSpec};
use crate::numeric::{recip_pow_k, ComplexValue, ONE, ZERO};

/// A catalog family together with the data needed for its closed forms.
#[derive(Clone, Debug)]
pub enum FamilyKind {
    MobiusOverN,
    /// Unscaled Möbius values; partial sums are the Mertens function. Every
    /// Euler factor is 1 + mu(p) = 0, so this is a deliberate negative case
    /// for the nonvanishing-factor condition.
    MobiusRaw,
    LiouvilleOverN,
    /// (-1)^(n-1) n^(-alpha).
    Eta { alpha: ComplexValue },
    /// g_k(n) n^(-alpha) with k = base_prime^exponent.
    Gk {
        k: u64,
        base_prime: u64,
        exponent: u32,
        alpha: ComplexValue,
    },
    /// chi(n) n^(-alpha) for a completely multiplicative period table.
    Character {
        modulus: u32,
        table: Vec<ComplexValue>,
        alpha: ComplexValue,
    },
}

/// A named, parameterized entry: the function spec plus flags describing
/// which closed forms exist for it.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    id: String,
    kind: FamilyKind,
    spec: MultiplicativeSpec,
    provenance: String,
    closed_form_series: bool,
    closed_form_euler: bool,
}

impl CatalogEntry {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn spec(&self) -> &MultiplicativeSpec {
        &self.spec
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Whether sum f(n) has a closed form (1 - k^(1-alpha)) zeta(alpha).
    pub fn has_series_closed_form(&self) -> bool {
        self.closed_form_series
    }

    /// Whether per-prime Euler factors have exact closed forms.
    pub fn has_euler_closed_form(&self) -> bool {
        self.closed_form_euler
    }

    /// Closed-form value of the full series sum, where one exists.
    pub fn series_closed_form<Z>(&self, zeta_eval: Z) -> Result<ComplexValue>
    where
        Z: Fn(ComplexValue) -> Result<ComplexValue>,
    {
        match &self.kind {
            FamilyKind::Eta { alpha } => {
                crate::series::closed_form_eta_series(*alpha, zeta_eval)
            }
            FamilyKind::Gk { k, alpha, .. } => {
                crate::series::closed_form_gk_series(*k, *alpha, zeta_eval)
            }
            _ => Err(Error::Validation(format!(
                "no closed-form series value for `{}`",
                self.id
            ))),
        }
    }
}

fn alpha_name(id: &str, alpha: ComplexValue) -> String {
    format!("{id}(alpha={}{:+}i)", alpha.re, alpha.im)
}

/// mu(n)/n: prime value -1/p, zero on higher prime powers. The per-prime
/// series is finite, so any geometric ratio certifies its (empty) tail.
pub fn mobius_over_n() -> CatalogEntry {
    let spec = MultiplicativeSpec::new("mobius-over-n", |p, k| {
        if k == 1 {
            ComplexValue::new(-1.0 / p as f64, 0.0)
        } else {
            ZERO
        }
    })
    .with_tail(0.5, 1)
    .with_envelope(1.0, 1.0)
    .with_first_power_form(FirstPowerForm::NegReciprocal);
    CatalogEntry {
        id: "mobius-over-n".into(),
        kind: FamilyKind::MobiusOverN,
        spec,
        provenance: "Moebius function scaled by 1/n; series sum 0, Euler factors 1 - 1/p".into(),
        closed_form_series: false,
        closed_form_euler: true,
    }
}

/// Raw mu(n): partial sums are the Mertens function M(x).
pub fn mobius_raw() -> CatalogEntry {
    let spec = MultiplicativeSpec::new("mobius-raw", |_, k| {
        if k == 1 {
            ComplexValue::new(-1.0, 0.0)
        } else {
            ZERO
        }
    })
    .with_tail(0.5, 1);
    CatalogEntry {
        id: "mobius-raw".into(),
        kind: FamilyKind::MobiusRaw,
        spec,
        provenance: "unscaled Moebius function; partial sums are Mertens M(x)".into(),
        closed_form_series: false,
        closed_form_euler: true,
    }
}

/// lambda(n)/n: completely multiplicative with f(p) = -1/p.
pub fn liouville_over_n() -> CatalogEntry {
    let spec = MultiplicativeSpec::new("liouville-over-n", |p, k| {
        let m = (p as f64).powi(-(k as i32));
        if k % 2 == 1 {
            ComplexValue::new(-m, 0.0)
        } else {
            ComplexValue::new(m, 0.0)
        }
    })
    .completely_multiplicative(true)
    .with_tail(0.5, 0)
    .with_envelope(1.0, 1.0)
    .with_first_power_form(FirstPowerForm::NegReciprocal);
    CatalogEntry {
        id: "liouville-over-n".into(),
        kind: FamilyKind::LiouvilleOverN,
        spec,
        provenance: "Liouville function scaled by 1/n; completely multiplicative, factors 1/(1+1/p)"
            .into(),
        closed_form_series: false,
        closed_form_euler: true,
    }
}

/// (-1)^(n-1) n^(-alpha) for Re alpha > 0: value -p^(-k alpha) at powers of
/// 2, +p^(-k alpha) at odd prime powers.
pub fn eta_family(alpha: ComplexValue) -> Result<CatalogEntry> {
    if alpha.re <= 0.0 {
        return Err(Error::Domain(format!(
            "eta family needs Re(alpha) > 0, got {}",
            alpha.re
        )));
    }
    let a = alpha;
    let spec = MultiplicativeSpec::new(alpha_name("eta", alpha), move |p, k| {
        let m = recip_pow_k(p, k, a);
        if p == 2 {
            -m
        } else {
            m
        }
    })
    .with_tail(2f64.powf(-alpha.re), 0)
    .with_envelope(1.0, alpha.re);
    Ok(CatalogEntry {
        id: "eta".into(),
        kind: FamilyKind::Eta { alpha },
        spec,
        provenance: "alternating signs over n^alpha; series sum (1 - 2^(1-alpha)) zeta(alpha)"
            .into(),
        closed_form_series: true,
        closed_form_euler: true,
    })
}

/// g_k(n) n^(-alpha) where g_k is 1-k on multiples of k and 1 elsewhere.
/// Multiplicative exactly when k is a prime power; anything else is refused.
pub fn g_family(k: u64, alpha: ComplexValue) -> Result<CatalogEntry> {
    if k < 2 {
        return Err(Error::Construction(format!("g_k needs k >= 2, got {k}")));
    }
    if alpha.re <= 0.0 {
        return Err(Error::Domain(format!(
            "g_k family needs Re(alpha) > 0, got {}",
            alpha.re
        )));
    }
    let Some((base_prime, exponent)) = prime_power_parts(k) else {
        return Err(Error::Construction(format!(
            "g_{k} is not multiplicative: {k} is not a prime power \
             (split k = m*n with coprime m, n and g(m) g(n) = 1 != 1 - {k} = g(k))"
        )));
    };
    let a = alpha;
    let km1 = 1.0 - k as f64;
    let spec = MultiplicativeSpec::new(
        alpha_name(&format!("gk[k={k}]"), alpha),
        move |p, kk| {
            let m = recip_pow_k(p, kk, a);
            if p == base_prime && kk >= exponent {
                m * km1
            } else {
                m
            }
        },
    )
    .with_tail(2f64.powf(-alpha.re), exponent)
    .with_envelope((k as f64 - 1.0).max(1.0), alpha.re);
    Ok(CatalogEntry {
        id: "gk".into(),
        kind: FamilyKind::Gk {
            k,
            base_prime,
            exponent,
            alpha,
        },
        spec,
        provenance: format!(
            "1-k on multiples of k={k}, 1 elsewhere, over n^alpha; series sum (1 - k^(1-alpha)) zeta(alpha)"
        ),
        closed_form_series: true,
        closed_form_euler: true,
    })
}

/// chi(n) n^(-alpha) for a validated non-principal character table.
pub fn character_over_n_alpha(
    modulus: u32,
    table: Vec<ComplexValue>,
    alpha: ComplexValue,
) -> Result<CatalogEntry> {
    if alpha.re <= 0.0 {
        return Err(Error::Domain(format!(
            "character family needs Re(alpha) > 0, got {}",
            alpha.re
        )));
    }
    validate_character(modulus, &table)?;
    let a = alpha;
    let m = modulus as u64;
    let t = table.clone();
    let spec = MultiplicativeSpec::new(
        alpha_name(&format!("character[mod={modulus}]"), alpha),
        move |p, k| {
            let chi = t[(p % m) as usize];
            chi.powi(k as i32) * recip_pow_k(p, k, a)
        },
    )
    .completely_multiplicative(true)
    .with_tail(2f64.powf(-alpha.re), 0)
    .with_envelope(1.0, alpha.re);
    Ok(CatalogEntry {
        id: "character".into(),
        kind: FamilyKind::Character {
            modulus,
            table,
            alpha,
        },
        spec,
        provenance: format!("non-principal Dirichlet character mod {modulus} over n^alpha"),
        closed_form_series: false,
        closed_form_euler: true,
    })
}

/// Built-in non-principal character tables: mod 3 (chi(2) = -1) and mod 4
/// (chi(3) = -1).
pub fn builtin_character(modulus: u32) -> Result<Vec<ComplexValue>> {
    match modulus {
        3 => Ok(vec![ZERO, ONE, -ONE]),
        4 => Ok(vec![ZERO, ONE, ZERO, -ONE]),
        _ => Err(Error::Validation(format!(
            "no built-in character for modulus {modulus}; supply a table (built-ins: 3, 4)"
        ))),
    }
}

fn validate_character(modulus: u32, table: &[ComplexValue]) -> Result<()> {
    if modulus < 3 {
        return Err(Error::Validation(
            "character modulus must be at least 3 (no non-principal characters below)".into(),
        ));
    }
    if table.len() != modulus as usize {
        return Err(Error::Validation(format!(
            "character table length {} does not match modulus {modulus}",
            table.len()
        )));
    }
    let m = modulus as u64;
    for (n, &v) in table.iter().enumerate() {
        let coprime = gcd(n as u64, m) == 1;
        if coprime && v == ZERO {
            return Err(Error::Validation(format!(
                "chi({n}) = 0 but gcd({n}, {modulus}) = 1"
            )));
        }
        if !coprime && v != ZERO {
            return Err(Error::Validation(format!(
                "chi({n}) != 0 but gcd({n}, {modulus}) > 1"
            )));
        }
    }
    for a in 0..m {
        for b in 0..m {
            let lhs = table[((a * b) % m) as usize];
            let rhs = table[a as usize] * table[b as usize];
            if (lhs - rhs).norm() > 1e-12 {
                return Err(Error::Validation(format!(
                    "character not completely multiplicative at ({a}, {b})"
                )));
            }
        }
    }
    let period_sum: ComplexValue = table.iter().sum();
    if period_sum.norm() > 1e-12 {
        return Err(Error::Validation(
            "character period does not sum to zero (principal or invalid table)".into(),
        ));
    }
    Ok(())
}

/// Raw g_k sequence n -> 1-k if k | n else 1, for brute-force
/// multiplicativity demonstrations (valid for every k, multiplicative or
/// not).
pub fn raw_gk_rule(k: u64) -> impl Fn(u64) -> ComplexValue {
    move |n| {
        if n % k == 0 {
            ComplexValue::new(1.0 - k as f64, 0.0)
        } else {
            ONE
        }
    }
}

/// Parameters collected from the command line for [`resolve`].
#[derive(Clone, Copy, Debug, Default)]
pub struct FamilyParams {
    pub alpha: Option<ComplexValue>,
    pub k: Option<u64>,
    pub modulus: Option<u32>,
}

/// Build a catalog entry from its CLI id and parameters.
pub fn resolve(id: &str, params: &FamilyParams) -> Result<CatalogEntry> {
    let need_alpha = || {
        params.alpha.ok_or_else(|| {
            Error::Validation(format!("function `{id}` needs --alpha-re/--alpha-im"))
        })
    };
    match id {
        "mobius-over-n" => Ok(mobius_over_n()),
        "mobius-raw" => Ok(mobius_raw()),
        "liouville-over-n" => Ok(liouville_over_n()),
        "eta" => eta_family(need_alpha()?),
        "gk" => {
            let k = params
                .k
                .ok_or_else(|| Error::Validation("function `gk` needs --k".into()))?;
            g_family(k, need_alpha()?)
        }
        "character" => {
            let modulus = params.modulus.ok_or_else(|| {
                Error::Validation("function `character` needs --modulus (3 or 4)".into())
            })?;
            character_over_n_alpha(modulus, builtin_character(modulus)?, need_alpha()?)
        }
        other => Err(Error::Validation(format!(
            "unknown function id `{other}` \
             (known: mobius-over-n, mobius-raw, liouville-over-n, eta, gk, character)"
        ))),
    }
}

/// All parameterless entries plus representative parameterized ones; used by
/// the property tests.
pub fn sample_entries() -> Vec<CatalogEntry> {
    vec![
        mobius_over_n(),
        mobius_raw(),
        liouville_over_n(),
        eta_family(ComplexValue::new(2.0, 0.0)).unwrap(),
        eta_family(ComplexValue::new(0.5, 14.134725141734694)).unwrap(),
        g_family(9, ComplexValue::new(2.0, 0.0)).unwrap(),
        g_family(4, ComplexValue::new(1.0, 1.0)).unwrap(),
        character_over_n_alpha(4, builtin_character(4).unwrap(), ComplexValue::new(1.0, 0.0))
            .unwrap(),
        character_over_n_alpha(3, builtin_character(3).unwrap(), ComplexValue::new(0.5, 0.0))
            .unwrap(),
    ]
}

fn prime_power_parts(k: u64) -> Option<(u64, u32)> {
    let mut m = k;
    let mut p = 0u64;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        return Some((k, 1)); // k itself prime
    }
    let mut e = 0u32;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    if m == 1 {
        Some((p, e))
    } else {
        None
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
