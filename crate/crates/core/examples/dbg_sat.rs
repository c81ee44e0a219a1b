// quick probe of the saturation loop behavior for S_6 fixtures
fn main() {
    let ctx = mf_core::arith::PrimeContext::new(5, 6, 40).unwrap();
    match mf_core::fixtures::level11_cusp_space(&ctx, 6) {
        Ok(b) => println!("ok rank {} pivots {:?}", b.rank(), b.pivots()),
        Err(e) => println!("err: {e}"),
    }
}
