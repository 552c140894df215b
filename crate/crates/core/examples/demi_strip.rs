//! Derives the demi-stripped and no-function-name variants of a decompiled
//! function.
//!
//! cargo run --example demi_strip

use decompsum::transforms::{demi_strip, demi_strip_with, strip_function_name, DemiStripOptions};

const RTP_SESS_SSRC: &str = "ulong rtp_sess_ssrc(long param_1){ uint local_14; if (param_1 == 0){ local_14 = 0; } else { local_14 = *(uint *)(param_1 + 4);} return (ulong)local_14; }";

const SB_APPEND: &str = r#"undefined8 sb_append(long *param_1,void *param_2,size_t param_3)
{
  int iVar1;

  iVar1 = sb_grow(param_1,param_3);
  if (iVar1 != 0) {
    return 0xffffffff;
  }
  memcpy((void *)(*param_1 + param_1[1]),param_2,param_3);
  param_1[1] = param_1[1] + param_3;
  *(undefined *)(*param_1 + param_1[1]) = 0;
  return 0;
}"#;

fn main() -> decompsum::Result<()> {
    let (code, map) = demi_strip(RTP_SESS_SSRC, "rtp_sess_ssrc")?;
    println!("decompiled:\n{RTP_SESS_SSRC}\n\ndemi-stripped:\n{code}\n");
    for (from, to) in map.iter() {
        println!("  {from} -> {to}");
    }
    println!(
        "\nno function name:\n{}\n",
        strip_function_name(RTP_SESS_SSRC, "rtp_sess_ssrc")?
    );

    // callees are identifiers too; type names and literals stay
    let (code, _) = demi_strip(SB_APPEND, "sb_append")?;
    println!("{code}\n");

    let (kept, map) = demi_strip_with(
        SB_APPEND,
        "sb_append",
        DemiStripOptions {
            keep_generated: true,
        },
    )?;
    println!("keep_generated renames {} name(s):\n{kept}\n", map.len());

    match demi_strip(SB_APPEND, "sb_init") {
        Err(e) => println!("wrong name: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
