"""``abesd`` command line: authority, issuer, holder and verifier roles plus the bench.

Key material lives in ``$ABESD_HOME`` (default ``~/.abesd``):

    params.json          ABE public parameters
    msk.json             ABE master secret (authority only)
    issuer.jwk.json      issuer signing key (private JWK)
    issuer.pub.jwk.json  issuer verification key
    holder.jwk.json      holder key bound through ``cnf``
    credential.jwt       last issued SD-JWT
    disclosures.json     its Disclosures, as a JSON array of encoded strings

Exit codes: 0 success or accepted, 1 verification rejected, 2 usage error,
3 internal error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import abe, bench, jose, sdjwt, verifier
from .errors import AbeError, AbesdError, CodecError, HolderError, PolicyError
from .holder import present as make_presentation
from .policy import parse_policy
from .rng import default_rng

EXIT_OK, EXIT_REJECTED, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


def _home(ctx: click.Context) -> Path:
    return ctx.obj["home"]


def _read_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise click.UsageError(f"missing file {path} (run `abesd setup` first?)")
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"{path} is not valid JSON: {exc}")


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8").strip()
    except FileNotFoundError:
        raise click.UsageError(f"missing file {path} (run `abesd issue` first?)")


def _write_json(path: Path, obj, private: bool = False) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
    if private:
        path.chmod(0o600)


def _split_csv(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


@click.group()
@click.option("--home", type=click.Path(file_okay=False, path_type=Path), envvar="ABESD_HOME",
              default=lambda: str(Path.home() / ".abesd"), show_default="~/.abesd",
              help="Key directory (also ABESD_HOME).")
@click.pass_context
def cli(ctx, home):
    """Selective disclosure with attribute-based encrypted Disclosures."""
    ctx.ensure_object(dict)
    ctx.obj["home"] = home


@cli.command()
@click.option("--force", is_flag=True, help="Overwrite existing keys.")
@click.pass_context
def setup(ctx, force):
    """Create ABE params, master key and issuer/holder key pairs."""
    home = _home(ctx)
    if (home / "params.json").exists() and not force:
        raise click.UsageError(f"{home} already holds keys; pass --force to replace them")
    rng = default_rng()
    params, msk = abe.abe_setup(abe.SECURITY_LEVEL, rng)
    issuer, holder_key = jose.generate_signing_key(rng), jose.generate_signing_key(rng)
    _write_json(home / "params.json", abe.to_envelope(params))
    _write_json(home / "msk.json", abe.to_envelope(msk), private=True)
    _write_json(home / "issuer.jwk.json", jose.private_jwk(issuer), private=True)
    _write_json(home / "issuer.pub.jwk.json", jose.public_jwk(issuer))
    _write_json(home / "holder.jwk.json", jose.private_jwk(holder_key), private=True)
    click.echo(f"keys written to {home}")


@cli.command()
@click.option("--attrs", required=True, help="Comma-separated attribute names, e.g. A,B.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write the key here instead of stdout.")
@click.pass_context
def keygen(ctx, attrs, out):
    """Issue a verifier attribute key."""
    home = _home(ctx)
    params = abe.from_envelope(_read_json(home / "params.json"), "abe-params")
    msk = abe.from_envelope(_read_json(home / "msk.json"), "abe-msk")
    sk = abe.abe_keygen(msk, params, _split_csv(attrs))
    env = abe.to_envelope(sk)
    if out:
        _write_json(out, env, private=True)
    else:
        click.echo(json.dumps(env, indent=2))


@cli.command()
@click.option("--claims", "claims_file", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="JSON object of selectively disclosable claims.")
@click.option("--visible", "visible_file", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="JSON object of always-visible claims.")
@click.option("--iss", default="https://issuer.example", show_default=True)
@click.pass_context
def issue(ctx, claims_file, visible_file, iss):
    """Issue an SD-JWT to the holder key in the key directory."""
    home = _home(ctx)
    claims = _read_json(claims_file)
    visible = _read_json(visible_file) if visible_file else {}
    if not isinstance(claims, dict) or not isinstance(visible, dict):
        raise click.UsageError("claims files must hold JSON objects")
    issuer_key = jose.key_from_jwk(_read_json(home / "issuer.jwk.json"))
    holder_pub = jose.public_key_of(jose.key_from_jwk(_read_json(home / "holder.jwk.json")))
    jwt, disclosures = sdjwt.issue(claims, visible, holder_pub, issuer_key, iss=iss)
    (home / "credential.jwt").write_text(jwt.compact_text + "\n", encoding="ascii")
    _write_json(home / "disclosures.json", [d.encoding.text for d in disclosures])
    click.echo(jwt.compact_text)


@cli.command()
@click.option("--select", required=True, help="Comma-separated claim names to present.")
@click.option("--policy", "policies", multiple=True, metavar='NAME="POLICY"',
              help="Access policy for one selected claim; repeat per claim.")
@click.option("--aud", required=True)
@click.option("--nonce", required=True)
@click.pass_context
def present(ctx, select, policies, aud, nonce):
    """Encrypt selected Disclosures and print the presentation."""
    home = _home(ctx)
    wanted = _split_csv(select)
    by_name = {}
    for item in policies:
        name, sep, text = item.partition("=")
        if not sep:
            raise click.UsageError(f"--policy expects NAME=POLICY, got {item!r}")
        by_name[name.strip()] = parse_policy(text.strip().strip('"'))
    missing = [n for n in wanted if n not in by_name]
    if missing:
        raise click.UsageError(f"no --policy given for: {', '.join(missing)}")
    credential = _read_text(home / "credential.jwt")
    encoded = _read_json(home / "disclosures.json")
    disclosures = {d.claim_name: d for d in map(sdjwt.decode_disclosure, encoded)}
    unknown = [n for n in wanted if n not in disclosures]
    if unknown:
        raise click.UsageError(f"credential has no selectively disclosable claim: {', '.join(unknown)}")
    params = abe.from_envelope(_read_json(home / "params.json"), "abe-params")
    holder_key = jose.key_from_jwk(_read_json(home / "holder.jwk.json"))
    pres = make_presentation(credential, [(disclosures[n], by_name[n]) for n in wanted], params, holder_key, aud, nonce)
    click.echo(pres.text)


@cli.command()
@click.option("--key", "key_file", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Verifier attribute key envelope.")
@click.option("--aud", required=True)
@click.option("--nonce", required=True)
@click.option("--presentation", "pres_file", type=click.File("r"), default="-", show_default="stdin")
@click.option("--max-age", type=float, default=300.0, show_default=True, help="Seconds a KB-JWT stays fresh.")
@click.option("--output", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.pass_context
def verify(ctx, key_file, aud, nonce, pres_file, max_age, output):
    """Verify a presentation; exit 0 if accepted, 1 if rejected."""
    home = _home(ctx)
    sk = abe.from_envelope(_read_json(key_file), "abe-sk")
    params = abe.from_envelope(_read_json(home / "params.json"), "abe-params")
    issuer_pub = jose.key_from_jwk(_read_json(home / "issuer.pub.jwk.json"))
    vp = verifier.VerificationPolicy(issuer_pub, aud, nonce, max_age=max_age)
    report = verifier.verify_presentation(pres_file.read().strip(), sk, params, vp)
    if output == "json":
        click.echo(json.dumps(report.to_dict(), indent=2, ensure_ascii=False))
    else:
        click.echo("accepted" if report.accepted else f"rejected: {report.error or 'digest mismatch'}")
        for name, value in report.claims.items():
            click.echo(f"  {name} = {json.dumps(value, ensure_ascii=False)}")
        hidden = sum(not isinstance(o, verifier.Disclosed) for o in report.disclosures)
        if hidden:
            click.echo(f"  ({hidden} disclosure(s) not accessible with this key)")
    ctx.exit(EXIT_OK if report.accepted else EXIT_REJECTED)


@cli.command("bench")
@click.option("--counts", default="5,10,20", show_default=True)
@click.option("--reps", default=30, show_default=True, type=int)
@click.option("--warmup", default=3, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--policy-shape", type=click.Choice(bench.POLICY_SHAPES), default="single", show_default=True)
@click.option("--json", "json_out", type=click.Path(dir_okay=False, path_type=Path), help="Also write the report here.")
@click.option("--check/--no-check", default=True, show_default=True, help="Run the scaling checks; exit 1 on failure.")
def bench_cmd(counts, reps, warmup, seed, policy_shape, json_out, check):
    """Time issuance, presentation, decryption and verification."""
    try:
        cfg = bench.BenchConfig(tuple(int(c) for c in _split_csv(counts)), reps, warmup, policy_shape, seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))

    def row_line(row):
        click.echo(
            f"N={row.n:<3} generate {row.generate_ms.mean:8.2f} ms  client {row.client_total_ms.mean:8.2f} ms"
            f"  (encrypt {row.encrypt_ms.mean:8.2f})  decrypt {row.decrypt_ms.mean:8.2f} ms"
            f"  verify {row.verify_ms.mean:6.2f} ms"
        )

    report = bench.run_bench(cfg, progress=row_line)
    click.echo(f"backend: {report.machine['pairing_backend']}")
    if json_out:
        _write_json(json_out, report.to_dict())
    if check:
        result = bench.check_scaling(report)
        click.echo(str(result))
        if not result.passed:
            sys.exit(EXIT_REJECTED)


def main(argv=None) -> int:
    try:
        rc = cli.main(args=argv, prog_name="abesd", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except (PolicyError, AbeError, CodecError, HolderError, ValueError) as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_USAGE
    except AbesdError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_INTERNAL
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_INTERNAL
    return rc if isinstance(rc, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
