use std::path::{Path, PathBuf};

use super::{AdapterError, Result};
use crate::dataset::RegistrationCase;

/// Every placeholder a template may use.
pub const PLACEHOLDERS: [&str; 7] = [
    "fixed_image",
    "moving_image",
    "fixed_landmarks",
    "moving_landmarks",
    "workspace",
    "case_id",
    "method_config",
];

enum Piece<'a> {
    Literal(&'a str),
    Placeholder(&'a str),
}

/// Splits a template into literals and placeholder names. `{{` and `}}`
/// stand for literal braces.
fn tokenize(template: &str) -> Result<Vec<Piece<'_>>> {
    let mut pieces = Vec::new();
    let mut rest = template;
    while !rest.is_empty() {
        if let Some(tail) = rest.strip_prefix("{{") {
            pieces.push(Piece::Literal("{"));
            rest = tail;
        } else if let Some(tail) = rest.strip_prefix("}}") {
            pieces.push(Piece::Literal("}"));
            rest = tail;
        } else if let Some(tail) = rest.strip_prefix('{') {
            let end = tail
                .find('}')
                .ok_or_else(|| AdapterError::UnterminatedPlaceholder(template.to_string()))?;
            let name = &tail[..end];
            if !PLACEHOLDERS.contains(&name) {
                return Err(AdapterError::UnknownPlaceholder(name.to_string()));
            }
            pieces.push(Piece::Placeholder(name));
            rest = &tail[end + 1..];
        } else {
            let end = rest.find(['{', '}']).unwrap_or(rest.len()).max(1);
            pieces.push(Piece::Literal(&rest[..end]));
            rest = &rest[end..];
        }
    }
    Ok(pieces)
}

pub(crate) fn check_template(template: &str) -> Result<()> {
    tokenize(template).map(|_| ())
}

fn absolute(path: &Path) -> PathBuf {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf())
}

fn lookup(
    name: &str,
    case: &RegistrationCase,
    workspace: &Path,
    method_config: Option<&Path>,
) -> Result<String> {
    let path_str = |p: &Path| absolute(p).display().to_string();
    let opt_path = |p: &Option<PathBuf>| p.as_deref().map(path_str).unwrap_or_default();
    Ok(match name {
        "fixed_image" => path_str(&case.fixed_image),
        "moving_image" => path_str(&case.moving_image),
        "fixed_landmarks" => opt_path(&case.fixed_landmarks),
        "moving_landmarks" => opt_path(&case.moving_landmarks),
        "workspace" => path_str(workspace),
        "case_id" => case.case_id.to_string(),
        "method_config" => path_str(method_config.ok_or(AdapterError::MissingMethodConfig)?),
        other => return Err(AdapterError::UnknownPlaceholder(other.to_string())),
    })
}

/// Substitutes placeholders in a single string (used for output paths).
pub fn render_path(
    template: &str,
    case: &RegistrationCase,
    workspace: &Path,
    method_config: Option<&Path>,
) -> Result<String> {
    let mut out = String::with_capacity(template.len() + 64);
    for piece in tokenize(template)? {
        match piece {
            Piece::Literal(s) => out.push_str(s),
            Piece::Placeholder(name) => {
                out.push_str(&lookup(name, case, workspace, method_config)?)
            }
        }
    }
    Ok(out)
}

/// Renders a command template into a literal argument vector with absolute
/// paths.
pub fn render_command(
    template: &[String],
    case: &RegistrationCase,
    workspace: &Path,
    method_config: Option<&Path>,
) -> Result<Vec<String>> {
    template
        .iter()
        .map(|arg| render_path(arg, case, workspace, method_config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn case(fixed: &str, moving: &str) -> RegistrationCase {
        RegistrationCase {
            case_id: 4,
            fixed_image: fixed.into(),
            moving_image: moving.into(),
            fixed_landmarks: Some("/data/f.csv".into()),
            moving_landmarks: Some("/data/m.csv".into()),
            tissue_type: String::new(),
            sample_name: String::new(),
            scope: String::new(),
            scale_percent: 100.0,
            fixed_size: None,
        }
    }

    fn tpl(args: &[&str]) -> Vec<String> {
        args.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn substitutes_absolute_paths() {
        let c = case("imgs/fixed image.png", "/data/moving.png");
        let cmd = render_command(
            &tpl(&["reg", "{fixed_image}", "{moving_image}", "-o", "{workspace}"]),
            &c,
            Path::new("/tmp/ws"),
            None,
        )
        .unwrap();
        let cwd = std::env::current_dir().unwrap();
        assert_eq!(
            cmd,
            vec![
                "reg".to_string(),
                cwd.join("imgs/fixed image.png").display().to_string(),
                "/data/moving.png".into(),
                "-o".into(),
                "/tmp/ws".into(),
            ]
        );
    }

    #[test]
    fn verbatim_without_placeholders() {
        let t = tpl(&["echo", "hello", "--flag=1"]);
        let c = case("/a", "/b");
        assert_eq!(render_command(&t, &c, Path::new("/w"), None).unwrap(), t);
    }

    #[test]
    fn unknown_and_escaped_braces() {
        let c = case("/a", "/b");
        assert!(matches!(
            render_command(&tpl(&["x", "{bogus}"]), &c, Path::new("/w"), None),
            Err(AdapterError::UnknownPlaceholder(p)) if p == "bogus"
        ));
        assert!(matches!(
            render_path("{case_id", &c, Path::new("/w"), None),
            Err(AdapterError::UnterminatedPlaceholder(_))
        ));
        assert_eq!(
            render_path("{{literal}}_{case_id}", &c, Path::new("/w"), None).unwrap(),
            "{literal}_4"
        );
        assert_eq!(
            render_path("{workspace}/out/{case_id}.csv", &c, Path::new("/w"), None).unwrap(),
            "/w/out/4.csv"
        );
    }

    #[test]
    fn method_config_placeholder() {
        let c = case("/a", "/b");
        assert!(matches!(
            render_path("{method_config}", &c, Path::new("/w"), None),
            Err(AdapterError::MissingMethodConfig)
        ));
        assert_eq!(
            render_path("-p={method_config}", &c, Path::new("/w"), Some(Path::new("/cfg/p.txt")))
                .unwrap(),
            "-p=/cfg/p.txt"
        );
    }

    proptest! {
        #[test]
        fn injective_in_case_paths(a in "[a-z]{1,8}", b in "[a-z]{1,8}", c in "[a-z]{1,8}", d in "[a-z]{1,8}") {
            let t = tpl(&["reg", "{fixed_image}", "{moving_image}"]);
            let x = case(&format!("/{a}.png"), &format!("/{b}.png"));
            let y = case(&format!("/{c}.png"), &format!("/{d}.png"));
            let rx = render_command(&t, &x, Path::new("/w"), None).unwrap();
            let ry = render_command(&t, &y, Path::new("/w"), None).unwrap();
            prop_assert_eq!(rx == ry, a == c && b == d);
            prop_assert_eq!(&rx, &render_command(&t, &x, Path::new("/w"), None).unwrap());
        }
    }
}
