use std::time::Instant;
use branch_hdim::catalog::preset;
use branch_hdim::perm::PermGroup;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let name = args.get(1).cloned().unwrap_or("ggs:4:1,0,0".into());
    let n: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(5);
    let g = preset(&name).unwrap();
    let acts = g.level_actions(n).unwrap();
    for k in 1..=n {
        let t = Instant::now();
        let q = PermGroup::new(g.degree().pow(k as u32), acts.generators(k).to_vec()).unwrap();
        let o = q.order();
        println!("level {k}: bits {} strong {} base {} in {:?}", o.bits()-1, q.chain().strong_generators().len(), q.chain().base().len(), t.elapsed());
    }
}
