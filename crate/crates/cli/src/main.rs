fn main() {
    println!("chevalley");
}
